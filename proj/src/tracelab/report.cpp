#include "t2s/tracelab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "t2s/common/binary_io.hpp"

namespace t2s::tracelab {

namespace {

std::string number(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::vector<std::string> kind_columns() {
    std::vector<std::string> cols;
    for (auto kind : kAllActionKinds) cols.emplace_back(to_string(kind));
    return cols;
}

}  // namespace

Table summary_table(const std::map<std::string, SummaryStats>& summary) {
    Table t{"summary", {"group", "n", "mean_time_s", "std_time_s", "mean_steps", "std_steps"}, {}};
    for (const auto& [group, s] : summary) {
        t.rows.push_back({group, std::to_string(s.n), number(s.meanTime), number(s.stdTime), number(s.meanSteps),
                          number(s.stdSteps)});
    }
    return t;
}

Table frequency_table(const std::vector<KindCounts>& frequency) {
    Table t{"frequency", {"step"}, {}};
    for (auto& c : kind_columns()) t.columns.push_back(c);
    for (std::size_t i = 0; i < frequency.size(); ++i) {
        std::vector<std::string> row{std::to_string(i + 1)};
        for (auto c : frequency[i]) row.push_back(std::to_string(c));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table cumulative_table(const CumulativeSeries& series) {
    Table t{"cumulative", {"step"}, {}};
    for (const auto& c : series.categories) t.columns.push_back(c);
    for (std::size_t i = 0; i < series.counts.size(); ++i) {
        std::vector<std::string> row{std::to_string(i + 1)};
        for (auto c : series.counts[i]) row.push_back(std::to_string(c));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table transition_table(const TransitionMatrix& matrix) {
    Table t{"transitions", {"from", "to", "count", "ratio"}, {}};
    for (auto prev : kAllActionKinds) {
        for (auto next : kAllActionKinds) {
            const auto c = matrix.counts[index_of(prev)][index_of(next)];
            if (c == 0) continue;
            t.rows.push_back({std::string(to_string(prev)), std::string(to_string(next)), std::to_string(c),
                              number(matrix.ratio(prev, next))});
        }
    }
    return t;
}

std::vector<Table> report_tables(const std::vector<RunRecord>& records, GroupBy groupBy) {
    return {summary_table(summarize(records, groupBy)), frequency_table(action_frequency_by_step(records)),
            cumulative_table(cumulative_by_category(records)), transition_table(transition_counts(records))};
}

namespace {

std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n\r") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string to_csv(const Table& table) {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_field(cells[i]);
        out += '\n';
    };
    line(table.columns);
    for (const auto& row : table.rows) line(row);
    return out;
}

Result<Table, std::string> parse_csv(const std::string& name, const std::string& text) {
    std::vector<std::vector<std::string>> lines;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(cell));
            cell.clear();
            any = true;
        } else if (c == '\n') {
            row.push_back(std::move(cell));
            cell.clear();
            lines.push_back(std::move(row));
            row.clear();
            any = false;
        } else if (c != '\r') {
            cell += c;
            any = true;
        }
    }
    if (quoted) return std::string("unterminated quoted field");
    if (any) {
        row.push_back(std::move(cell));
        lines.push_back(std::move(row));
    }
    if (lines.empty()) return std::string("missing header line");
    Table t{name, lines.front(), {}};
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].size() != t.columns.size()) {
            return "line " + std::to_string(i + 1) + " has " + std::to_string(lines[i].size()) + " fields, expected " +
                   std::to_string(t.columns.size());
        }
        t.rows.push_back(std::move(lines[i]));
    }
    return t;
}

std::string to_json(const Table& table) {
    nlohmann::json doc{{"table", table.name}, {"columns", table.columns}, {"rows", table.rows}};
    return doc.dump(2) + "\n";
}

Result<Table, std::string> parse_table_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) return std::string("not JSON");
    try {
        Table t{doc.at("table").get<std::string>(), doc.at("columns").get<std::vector<std::string>>(),
                doc.at("rows").get<std::vector<std::vector<std::string>>>()};
        for (const auto& r : t.rows) {
            if (r.size() != t.columns.size()) return std::string("row width differs from column count");
        }
        return t;
    } catch (const std::exception& e) {
        return std::string(e.what());
    }
}

Result<std::vector<std::filesystem::path>, std::string> emit_report(const std::vector<RunRecord>& records,
                                                                   const std::filesystem::path& dir,
                                                                   ReportFormat format, GroupBy groupBy) {
    std::vector<std::filesystem::path> written;
    try {
        std::filesystem::create_directories(dir);
        for (const auto& table : report_tables(records, groupBy)) {
            const bool csv = format == ReportFormat::Csv;
            auto path = dir / (table.name + (csv ? ".csv" : ".json"));
            io::write_text_file(path, csv ? to_csv(table) : to_json(table));
            written.push_back(std::move(path));
        }
    } catch (const std::exception& e) {
        return std::string(e.what());
    }
    return written;
}

Result<Table, std::string> read_table(const std::filesystem::path& file) {
    std::string text;
    try {
        text = io::read_text_file(file);
    } catch (const std::exception& e) {
        return std::string(e.what());
    }
    if (file.extension() == ".json") return parse_table_json(text);
    return parse_csv(file.stem().string(), text);
}

}  // namespace t2s::tracelab
