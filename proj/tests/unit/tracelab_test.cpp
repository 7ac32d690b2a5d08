#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "analytics_oracles.hpp"
#include "t2s/common/binary_io.hpp"
#include "t2s/tracelab/analytics.hpp"
#include "t2s/tracelab/report.hpp"
#include "t2s/tracelab/run_log.hpp"

using namespace t2s;
using namespace t2s::tracelab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("t2s_tracelab_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunRecord sample_record(const std::string& id) {
    RunRecord r;
    r.runId = id;
    r.datasetName = "DBpedia";
    r.question = "¿Cuál es la población de Berlín?\n\"quoted\"";
    r.language = "es";
    r.actions = {ActionKind::SearchEntityByLabel, ActionKind::ExecuteSparql, ActionKind::Stop};
    r.stepCount = 3;
    r.durationSeconds = 12.345678901234567;
    r.origin = RunOrigin::Stop;
    r.finalQuery = "SELECT ?p WHERE { <http://dbpedia.org/resource/Berlin> ?p ?o }";
    r.trace = {{"t1", ActionKind::SearchEntityByLabel, "Berlín", "obs 1", 12, false, false},
               {"t2", ActionKind::ExecuteSparql, r.finalQuery, "obs 2", 30, false, false},
               {"t3", ActionKind::Stop, "", "", 0, false, false}};
    return r;
}

RunRecord steps_record(const std::string& dataset, std::vector<ActionKind> actions, double seconds = 1.0) {
    RunRecord r;
    r.runId = dataset + std::to_string(actions.size());
    r.datasetName = dataset;
    r.language = "en";
    r.actions = std::move(actions);
    r.stepCount = r.actions.size();
    r.durationSeconds = seconds;
    return r;
}

constexpr auto S = ActionKind::SearchEntityByLabel;
constexpr auto E = ActionKind::ExecuteSparql;
constexpr auto X = ActionKind::Stop;

}  // namespace

TEST(RunLog, AppendThenLoadRoundTrips) {
    const auto dir = temp_dir("roundtrip");
    RunLog log(dir / "runs.jsonl");
    const auto a = sample_record("a");
    auto b = sample_record("b");
    b.origin = RunOrigin::FallbackExtraction;
    ASSERT_TRUE(log.append(a));
    ASSERT_TRUE(log.append(b));
    auto loaded = load_run_log(dir / "runs.jsonl");
    ASSERT_TRUE(loaded);
    ASSERT_EQ(loaded->records.size(), 2u);
    EXPECT_EQ(loaded->records[0], a);
    EXPECT_EQ(loaded->records[1], b);
    EXPECT_TRUE(loaded->warnings.empty());
}

TEST(RunLog, TruncatedFinalLineSkippedWithWarning) {
    const auto dir = temp_dir("truncated");
    const auto path = dir / "runs.jsonl";
    RunLog log(path);
    ASSERT_TRUE(log.append(sample_record("a")));
    ASSERT_TRUE(log.append(sample_record("b")));
    const auto full = to_json_line(sample_record("c"));
    std::ofstream(path, std::ios::app) << full.substr(0, full.size() / 2);
    auto loaded = load_run_log(path);
    ASSERT_TRUE(loaded);
    EXPECT_EQ(loaded->records.size(), 2u);
    ASSERT_EQ(loaded->warnings.size(), 1u);
    EXPECT_NE(loaded->warnings[0].find("line 3"), std::string::npos);
}

TEST(RunLog, ConcurrentAppendersKeepLinesIntact) {
    const auto dir = temp_dir("concurrent");
    const auto path = dir / "runs.jsonl";
    auto writer = [&](const std::string& prefix) {
        RunLog log(path);  // separate objects: only O_APPEND protects them
        for (int i = 0; i < 100; ++i) {
            auto r = sample_record(prefix + std::to_string(i));
            r.finalQuery += std::string(static_cast<std::size_t>(i) * 37, 'x');
            ASSERT_TRUE(log.append(r));
        }
    };
    std::thread t1(writer, "a");
    std::thread t2(writer, "b");
    t1.join();
    t2.join();
    auto loaded = load_run_log(path);
    ASSERT_TRUE(loaded);
    EXPECT_EQ(loaded->records.size(), 200u);
    EXPECT_TRUE(loaded->warnings.empty());
}

TEST(RunLog, ValidateInvariants) {
    auto r = sample_record("a");
    EXPECT_TRUE(validate(r).empty());
    r.stepCount = 2;
    r.durationSeconds = 0;
    EXPECT_EQ(validate(r).size(), 2u);
}

TEST(Summary, HandArithmetic) {
    auto s = summarize({steps_record("d", {S, E}, 1.0), steps_record("d", {S, E, E, X}, 3.0)});
    ASSERT_EQ(s.size(), 1u);
    EXPECT_DOUBLE_EQ(s["d"].meanSteps, 3.0);
    EXPECT_DOUBLE_EQ(s["d"].stdSteps, std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(s["d"].meanTime, 2.0);
    auto same = summarize({steps_record("d", {S}), steps_record("d", {E})});
    EXPECT_EQ(same["d"].stdSteps, 0.0);
    EXPECT_EQ(same["d"].stdTime, 0.0);
}

TEST(Summary, PublishedCorporateRow) {
    std::vector<RunRecord> log;
    for (int steps : oracles::corporate_step_sample()) {
        log.push_back(steps_record("corporate", std::vector<ActionKind>(static_cast<std::size_t>(steps), S)));
    }
    auto s = summarize(log)["corporate"];
    EXPECT_EQ(s.n, 50u);
    EXPECT_NEAR(s.meanSteps, 9.92, 1e-3);
    EXPECT_NEAR(s.stdSteps, 3.515795, 1e-3);
}

TEST(Summary, GroupByLanguage) {
    auto a = steps_record("DBpedia", {S});
    auto b = steps_record("DBpedia", {S});
    b.language = "es";
    auto s = summarize({a, b}, GroupBy::DatasetAndLanguage);
    EXPECT_EQ(s.count("DBpedia/en"), 1u);
    EXPECT_EQ(s.count("DBpedia/es"), 1u);
    EXPECT_TRUE(std::isnan(s["DBpedia/es"].stdSteps));
}

TEST(Frequency, Examples) {
    auto t = action_frequency_by_step({steps_record("d", {S, E, X}), steps_record("d", {S, E}), steps_record("d", {S})});
    ASSERT_EQ(t.size(), 3u);
    EXPECT_EQ(t[0][index_of(S)], 3u);
    std::size_t third = 0;
    for (auto c : t[2]) third += c;
    EXPECT_EQ(third, 1u);
}

TEST(Cumulative, SingleRun) {
    auto c = cumulative_by_category({steps_record("d", {ActionKind::SearchClassByLabel, E, X})});
    ASSERT_EQ(c.counts.size(), 3u);
    EXPECT_EQ(c.categories[2], "execute");
    EXPECT_EQ(c.counts[2][2], 1u);
    EXPECT_EQ(c.counts[0][0], 1u);
    EXPECT_EQ(c.counts[2][0], 1u);
}

TEST(Transitions, Example) {
    auto m = transition_counts({steps_record("d", {E, E, X})});
    EXPECT_EQ(m.counts[index_of(E)][index_of(E)], 1u);
    EXPECT_EQ(m.counts[index_of(E)][index_of(X)], 1u);
    EXPECT_DOUBLE_EQ(m.ratio(E, X), 0.5);
    EXPECT_EQ(m.row_total(X), 0u);
    EXPECT_EQ(m.ratio(X, E), 0.0);
}

TEST(Analytics, BruteForceOracles) {
    std::mt19937 rng(4242);
    for (int round = 0; round < 100; ++round) {
        const auto log = oracles::random_log(rng, 1 + static_cast<int>(rng() % 40));
        const auto freq = action_frequency_by_step(log);
        const auto bf = oracles::brute_frequency(log);
        for (std::size_t i = 0; i < freq.size(); ++i) {
            std::size_t colSum = 0;
            std::size_t runsWithStep = 0;
            for (const auto& r : log) runsWithStep += r.actions.size() > i ? 1 : 0;
            for (auto k : kAllActionKinds) {
                auto it = bf.find({i + 1, k});
                ASSERT_EQ(freq[i][index_of(k)], it == bf.end() ? 0u : it->second);
                colSum += freq[i][index_of(k)];
            }
            ASSERT_EQ(colSum, runsWithStep);
        }
        const auto cum = cumulative_by_category(log);
        for (std::size_t i = 0; i < cum.counts.size(); ++i) {
            for (std::size_t c = 0; c < cum.categories.size(); ++c) {
                ASSERT_EQ(cum.counts[i][c], oracles::brute_cumulative(log, i + 1, cum.categories[c]));
                if (i > 0) {
                    ASSERT_GE(cum.counts[i][c], cum.counts[i - 1][c]);
                }
            }
        }
        const auto m = transition_counts(log);
        const auto bt = oracles::brute_transitions(log);
        for (auto p : kAllActionKinds) {
            for (auto n : kAllActionKinds) {
                auto it = bt.find({p, n});
                ASSERT_EQ(m.counts[index_of(p)][index_of(n)], it == bt.end() ? 0u : it->second);
            }
        }
    }
}

TEST(Welch, PublishedSteps) {
    auto r = welch_t_test({100, 8.26, 3.486250}, {50, 9.92, 3.515795});
    ASSERT_TRUE(r);
    EXPECT_NEAR(r->t, -2.734, 0.005);
    EXPECT_NEAR(r->pTwoTailed, 0.00744, 0.0005);
}

TEST(Welch, PublishedTimes) {
    auto r = welch_t_test({100, 51.44, 29.395018}, {50, 59.62, 25.210858});
    ASSERT_TRUE(r);
    EXPECT_NEAR(r->t, -1.770, 0.005);
    EXPECT_NEAR(r->pTwoTailed, 0.079, 0.002);
}

TEST(Welch, FromIntegerSamples) {
    std::vector<double> a;
    std::vector<double> b;
    for (int v : oracles::dbpedia_en_step_sample()) a.push_back(v);
    for (int v : oracles::corporate_step_sample()) b.push_back(v);
    EXPECT_NEAR(sample_mean(a), 8.26, 1e-9);
    EXPECT_NEAR(sample_std(a), 3.486250, 1e-3);
    auto r = welch_t_test({100, sample_mean(a), sample_std(a)}, {50, sample_mean(b), sample_std(b)});
    ASSERT_TRUE(r);
    EXPECT_NEAR(r->t, -2.734, 0.005);
}

TEST(Welch, SymmetryAndDegenerate) {
    const SampleSummary a{30, 5.0, 2.0};
    const SampleSummary b{12, 6.5, 1.0};
    auto ab = welch_t_test(a, b);
    auto ba = welch_t_test(b, a);
    EXPECT_DOUBLE_EQ(ab->t, -ba->t);
    EXPECT_DOUBLE_EQ(ab->pTwoTailed, ba->pTwoTailed);
    auto same = welch_t_test(a, a);
    EXPECT_EQ(same->t, 0.0);
    EXPECT_DOUBLE_EQ(same->pTwoTailed, 1.0);
    auto flat = welch_t_test({5, 3.0, 0.0}, {5, 3.0, 0.0});
    EXPECT_EQ(flat->t, 0.0);
    EXPECT_EQ(flat->pTwoTailed, 1.0);
    EXPECT_FALSE(welch_t_test({1, 3.0, 1.0}, {5, 3.0, 1.0}));
}

TEST(Welch, PValueMatchesIntegrationOracle) {
    for (double df : {5.0, 30.0, 100.0}) {
        for (double t : {0.0, 1.96, 2.576}) {
            EXPECT_NEAR(student_t_two_tailed_p(t, df), oracles::t_two_tailed_by_integration(t, df), 1e-6)
                << "df=" << df << " t=" << t;
        }
    }
    EXPECT_NEAR(student_t_two_tailed_p(1.96, 5), 0.1072879525052941, 1e-9);
    EXPECT_NEAR(student_t_two_tailed_p(2.576, 100), 0.011457019413466284, 1e-9);
}

TEST(Welch, PValueMonotoneInT) {
    double prev = 1.0;
    for (double t = 0.0; t < 12.0; t += 0.05) {
        const double p = student_t_two_tailed_p(t, 7.3);
        ASSERT_LE(p, prev + 1e-15);
        prev = p;
    }
}

TEST(Report, EmptyLogGivesHeadersOnly) {
    const auto dir = temp_dir("empty");
    auto files = emit_report({}, dir, ReportFormat::Csv);
    ASSERT_TRUE(files);
    ASSERT_EQ(files->size(), 4u);
    for (const auto& f : *files) {
        const auto text = io::read_text_file(f);
        EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1) << f;
    }
}

TEST(Report, FilesReloadToSameTables) {
    std::mt19937 rng(7);
    auto log = oracles::random_log(rng, 60);
    log[0].datasetName = "name, with \"comma\"";
    const auto tables = report_tables(log);
    for (auto format : {ReportFormat::Csv, ReportFormat::Json}) {
        const auto dir = temp_dir(format == ReportFormat::Csv ? "csv" : "json");
        auto files = emit_report(log, dir, format);
        ASSERT_TRUE(files) << files.error();
        ASSERT_EQ(files->size(), tables.size());
        for (std::size_t i = 0; i < tables.size(); ++i) {
            auto loaded = read_table((*files)[i]);
            ASSERT_TRUE(loaded) << loaded.error();
            EXPECT_EQ(*loaded, tables[i]);
        }
    }
    const auto freq = action_frequency_by_step(log);
    EXPECT_EQ(tables[1].rows.size(), freq.size());
    EXPECT_EQ(tables[0].columns.front(), "group");
    EXPECT_EQ(tables[1].columns[1], "get_knowledgegraph_entry");
}
