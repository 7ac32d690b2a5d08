#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "t2s/common/action_kind.hpp"
#include "t2s/common/result.hpp"

namespace t2s::tracelab {

inline constexpr int kRunRecordSchema = 1;

enum class RunOrigin { Stop, FallbackExtraction };

std::string_view to_string(RunOrigin origin);
std::optional<RunOrigin> parse_run_origin(std::string_view name);

/// One controller step as logged. Rejected stops are kept here for the audit
/// trail but are not part of RunRecord::actions.
struct TraceEntry {
    std::string thought;
    ActionKind kind = ActionKind::Stop;
    std::string argument;
    std::string observation;
    std::int64_t durationMs = 0;
    bool repeatIntercepted = false;
    bool rejected = false;

    bool operator==(const TraceEntry&) const = default;
};

struct RunRecord {
    std::string runId;
    std::string datasetName;
    std::string question;
    std::string language;
    std::vector<ActionKind> actions;
    double durationSeconds = 0.0;
    std::size_t stepCount = 0;
    RunOrigin origin = RunOrigin::Stop;
    std::string finalQuery;
    std::vector<TraceEntry> trace;

    bool operator==(const RunRecord&) const = default;
};

/// Empty when the record satisfies its invariants.
std::vector<std::string> validate(const RunRecord& record);

std::string to_json_line(const RunRecord& record);
Result<RunRecord, std::string> parse_json_line(std::string_view line);

/// Append-only JSON Lines file. Every record is written with a single
/// O_APPEND write, so several RunLog objects (or processes) can share a file;
/// a mutex serializes writers within one object.
class RunLog {
public:
    explicit RunLog(std::filesystem::path path);

    Result<Unit, std::string> append(const RunRecord& record);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::mutex mutex_;
};

struct LoadedLog {
    std::vector<RunRecord> records;
    std::vector<std::string> warnings;
};

/// Unparsable lines (typically a final line cut short by a crash) are skipped
/// with one warning each. Fails only when the file cannot be read.
Result<LoadedLog, std::string> load_run_log(const std::filesystem::path& path);

}  // namespace t2s::tracelab
