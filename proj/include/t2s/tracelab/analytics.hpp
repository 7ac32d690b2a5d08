#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "t2s/common/action_kind.hpp"
#include "t2s/common/result.hpp"
#include "t2s/tracelab/run_log.hpp"

namespace t2s::tracelab {

struct SummaryStats {
    std::size_t n = 0;
    double meanTime = 0.0;
    double stdTime = 0.0;  // sample std (n-1); NaN when n < 2
    double meanSteps = 0.0;
    double stdSteps = 0.0;
};

enum class GroupBy { Dataset, DatasetAndLanguage };

/// Keys are the dataset name, or "name/lang" for DatasetAndLanguage.
std::map<std::string, SummaryStats> summarize(const std::vector<RunRecord>& records, GroupBy groupBy = GroupBy::Dataset);

double sample_mean(const std::vector<double>& xs);
double sample_std(const std::vector<double>& xs);

using KindCounts = std::array<std::size_t, kAllActionKinds.size()>;

/// Row i counts the actions taken at step i+1 across runs.
std::vector<KindCounts> action_frequency_by_step(const std::vector<RunRecord>& records);

struct CategoryMap {
    std::vector<std::string> categories;
    std::array<std::size_t, kAllActionKinds.size()> categoryOf{};  // index into categories

    /// search = three search actions, inspect = two get actions, execute, stop.
    static CategoryMap defaults();
};

struct CumulativeSeries {
    std::vector<std::string> categories;
    /// counts[i][c]: actions of category c taken at steps 1..i+1, over all runs.
    std::vector<std::vector<std::size_t>> counts;
};

CumulativeSeries cumulative_by_category(const std::vector<RunRecord>& records,
                                        const CategoryMap& categories = CategoryMap::defaults());

struct TransitionMatrix {
    std::array<KindCounts, kAllActionKinds.size()> counts{};  // [prev][next]

    std::size_t row_total(ActionKind prev) const;
    /// counts[prev][next] / row_total(prev), 0 for an empty row.
    double ratio(ActionKind prev, ActionKind next) const;
};

TransitionMatrix transition_counts(const std::vector<RunRecord>& records);

struct SampleSummary {
    double n = 0;
    double mean = 0;
    double std = 0;
};

struct TestResult {
    double t = 0;
    double df = 0;
    double pTwoTailed = 1;
};

struct DegenerateInput {
    std::string message;
};

/// Welch's unequal-variance t-test from summary statistics.
Result<TestResult, DegenerateInput> welch_t_test(const SampleSummary& a, const SampleSummary& b);

/// I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_tailed_p(double t, double df);

}  // namespace t2s::tracelab
