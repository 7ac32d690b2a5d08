#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "t2s/common/result.hpp"
#include "t2s/tracelab/analytics.hpp"

namespace t2s::tracelab {

/// A rendered table: every cell already formatted, so written and re-read
/// tables compare with ==.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    bool operator==(const Table&) const = default;
};

Table summary_table(const std::map<std::string, SummaryStats>& summary);
Table frequency_table(const std::vector<KindCounts>& frequency);
Table cumulative_table(const CumulativeSeries& series);
/// Long form: one row per observed (from, to) pair with count and row ratio.
Table transition_table(const TransitionMatrix& matrix);

/// The four tables above, in that order.
std::vector<Table> report_tables(const std::vector<RunRecord>& records, GroupBy groupBy = GroupBy::Dataset);

enum class ReportFormat { Csv, Json };

std::string to_csv(const Table& table);
Result<Table, std::string> parse_csv(const std::string& name, const std::string& text);
std::string to_json(const Table& table);
Result<Table, std::string> parse_table_json(const std::string& text);

/// Writes <dir>/<table>.csv or .json for each table; returns the paths.
Result<std::vector<std::filesystem::path>, std::string> emit_report(const std::vector<RunRecord>& records,
                                                                   const std::filesystem::path& dir, ReportFormat format,
                                                                   GroupBy groupBy = GroupBy::Dataset);
Result<Table, std::string> read_table(const std::filesystem::path& file);

}  // namespace t2s::tracelab
