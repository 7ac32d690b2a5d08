#include "t2s/tracelab/run_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace t2s::tracelab {

using nlohmann::json;

std::string_view to_string(RunOrigin origin) {
    return origin == RunOrigin::Stop ? "stop" : "fallbackExtraction";
}

std::optional<RunOrigin> parse_run_origin(std::string_view name) {
    if (name == "stop") return RunOrigin::Stop;
    if (name == "fallbackExtraction") return RunOrigin::FallbackExtraction;
    return std::nullopt;
}

std::vector<std::string> validate(const RunRecord& record) {
    std::vector<std::string> problems;
    if (record.stepCount != record.actions.size()) {
        problems.push_back("stepCount " + std::to_string(record.stepCount) + " differs from " +
                           std::to_string(record.actions.size()) + " actions");
    }
    if (!(record.durationSeconds > 0.0) || !std::isfinite(record.durationSeconds)) {
        problems.push_back("durationSeconds must be positive");
    }
    if (record.runId.empty()) problems.push_back("runId is empty");
    return problems;
}

std::string to_json_line(const RunRecord& r) {
    json actions = json::array();
    for (auto kind : r.actions) actions.push_back(to_string(kind));
    json trace = json::array();
    for (const auto& t : r.trace) {
        trace.push_back({{"thought", t.thought},
                         {"action", to_string(t.kind)},
                         {"argument", t.argument},
                         {"observation", t.observation},
                         {"durationMs", t.durationMs},
                         {"repeatIntercepted", t.repeatIntercepted},
                         {"rejected", t.rejected}});
    }
    json doc{{"schema", kRunRecordSchema},
             {"runId", r.runId},
             {"dataset", r.datasetName},
             {"question", r.question},
             {"language", r.language},
             {"actions", std::move(actions)},
             {"durationSeconds", r.durationSeconds},
             {"stepCount", r.stepCount},
             {"origin", to_string(r.origin)},
             {"finalQuery", r.finalQuery},
             {"trace", std::move(trace)}};
    // invalid UTF-8 from an LLM must not make the record unloggable
    return doc.dump(-1, ' ', false, json::error_handler_t::replace);
}

namespace {

ActionKind kind_from(const json& v) {
    auto kind = parse_action_kind(v.get<std::string>());
    if (!kind) throw std::runtime_error("unknown action " + v.get<std::string>());
    return *kind;
}

}  // namespace

Result<RunRecord, std::string> parse_json_line(std::string_view line) {
    const auto doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return std::string("not a JSON object");
    try {
        if (doc.at("schema").get<int>() != kRunRecordSchema) {
            return "unsupported schema " + doc.at("schema").dump();
        }
        RunRecord r;
        r.runId = doc.at("runId").get<std::string>();
        r.datasetName = doc.at("dataset").get<std::string>();
        r.question = doc.at("question").get<std::string>();
        r.language = doc.at("language").get<std::string>();
        for (const auto& a : doc.at("actions")) r.actions.push_back(kind_from(a));
        r.durationSeconds = doc.at("durationSeconds").get<double>();
        r.stepCount = doc.at("stepCount").get<std::size_t>();
        auto origin = parse_run_origin(doc.at("origin").get<std::string>());
        if (!origin) return "unknown origin " + doc.at("origin").dump();
        r.origin = *origin;
        r.finalQuery = doc.at("finalQuery").get<std::string>();
        if (doc.contains("trace")) {
            for (const auto& t : doc.at("trace")) {
                TraceEntry e;
                e.thought = t.at("thought").get<std::string>();
                e.kind = kind_from(t.at("action"));
                e.argument = t.at("argument").get<std::string>();
                e.observation = t.at("observation").get<std::string>();
                e.durationMs = t.at("durationMs").get<std::int64_t>();
                e.repeatIntercepted = t.at("repeatIntercepted").get<bool>();
                e.rejected = t.value("rejected", false);
                r.trace.push_back(std::move(e));
            }
        }
        return r;
    } catch (const std::exception& e) {
        return std::string(e.what());
    }
}

RunLog::RunLog(std::filesystem::path path) : path_(std::move(path)) {}

Result<Unit, std::string> RunLog::append(const RunRecord& record) {
    const std::string line = to_json_line(record) + "\n";
    std::lock_guard lock(mutex_);
    if (path_.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path_.parent_path(), ec);
    }
    const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0) return "cannot open run log " + path_.string() + ": " + std::strerror(errno);
    std::size_t written = 0;
    std::string error;
    while (written < line.size()) {
        const auto n = ::write(fd, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            error = std::strerror(errno);
            break;
        }
        written += static_cast<std::size_t>(n);
    }
    ::close(fd);
    if (!error.empty()) return "write to run log failed: " + error;
    return Unit{};
}

Result<LoadedLog, std::string> load_run_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "cannot read run log " + path.string();
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    LoadedLog out;
    std::size_t lineNo = 0;
    for (std::size_t pos = 0; pos < content.size();) {
        auto nl = content.find('\n', pos);
        const bool terminated = nl != std::string::npos;
        if (!terminated) nl = content.size();
        ++lineNo;
        const std::string_view line(content.data() + pos, nl - pos);
        pos = nl + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        auto record = parse_json_line(line);
        if (!record) {
            out.warnings.push_back("line " + std::to_string(lineNo) + (terminated ? "" : " (unterminated)") +
                                   " skipped: " + record.error());
            continue;
        }
        out.records.push_back(std::move(record).value());
    }
    return out;
}

}  // namespace t2s::tracelab
