#include "t2s/tracelab/analytics.hpp"

#include <cmath>
#include <limits>

namespace t2s::tracelab {

double sample_mean(const std::vector<double>& xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
    if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double m = sample_mean(xs);
    double ss = 0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::map<std::string, SummaryStats> summarize(const std::vector<RunRecord>& records, GroupBy groupBy) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : records) {
        const std::string key = groupBy == GroupBy::Dataset ? r.datasetName : r.datasetName + "/" + r.language;
        auto& [times, steps] = groups[key];
        times.push_back(r.durationSeconds);
        steps.push_back(static_cast<double>(r.stepCount));
    }
    std::map<std::string, SummaryStats> out;
    for (const auto& [key, g] : groups) {
        out[key] = SummaryStats{g.first.size(), sample_mean(g.first), sample_std(g.first), sample_mean(g.second),
                                sample_std(g.second)};
    }
    return out;
}

std::vector<KindCounts> action_frequency_by_step(const std::vector<RunRecord>& records) {
    std::vector<KindCounts> table;
    for (const auto& r : records) {
        if (r.actions.size() > table.size()) table.resize(r.actions.size(), KindCounts{});
        for (std::size_t i = 0; i < r.actions.size(); ++i) ++table[i][index_of(r.actions[i])];
    }
    return table;
}

CategoryMap CategoryMap::defaults() {
    CategoryMap m;
    m.categories = {"search", "inspect", "execute", "stop"};
    m.categoryOf[index_of(ActionKind::SearchEntityByLabel)] = 0;
    m.categoryOf[index_of(ActionKind::SearchPropertyByLabel)] = 0;
    m.categoryOf[index_of(ActionKind::SearchClassByLabel)] = 0;
    m.categoryOf[index_of(ActionKind::GetKnowledgegraphEntry)] = 1;
    m.categoryOf[index_of(ActionKind::GetPropertyExamples)] = 1;
    m.categoryOf[index_of(ActionKind::ExecuteSparql)] = 2;
    m.categoryOf[index_of(ActionKind::Stop)] = 3;
    return m;
}

CumulativeSeries cumulative_by_category(const std::vector<RunRecord>& records, const CategoryMap& categories) {
    CumulativeSeries out;
    out.categories = categories.categories;
    const auto frequency = action_frequency_by_step(records);
    std::vector<std::size_t> running(categories.categories.size(), 0);
    for (const auto& row : frequency) {
        for (ActionKind kind : kAllActionKinds) running.at(categories.categoryOf[index_of(kind)]) += row[index_of(kind)];
        out.counts.push_back(running);
    }
    return out;
}

std::size_t TransitionMatrix::row_total(ActionKind prev) const {
    std::size_t total = 0;
    for (auto c : counts[index_of(prev)]) total += c;
    return total;
}

double TransitionMatrix::ratio(ActionKind prev, ActionKind next) const {
    const auto total = row_total(prev);
    if (total == 0) return 0.0;
    return static_cast<double>(counts[index_of(prev)][index_of(next)]) / static_cast<double>(total);
}

TransitionMatrix transition_counts(const std::vector<RunRecord>& records) {
    TransitionMatrix m;
    for (const auto& r : records) {
        for (std::size_t i = 1; i < r.actions.size(); ++i) ++m.counts[index_of(r.actions[i - 1])][index_of(r.actions[i])];
    }
    return m;
}

namespace {

// Continued fraction for I_x(a,b), modified Lentz. Converges quickly for
// x < (a+1)/(a+b+2); the caller uses the symmetry relation otherwise.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 500;
    constexpr double kEpsilon = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0) || !(b > 0) || std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lnFront = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(lnFront);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed_p(double t, double df) {
    if (std::isnan(t) || !(df > 0)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

Result<TestResult, DegenerateInput> welch_t_test(const SampleSummary& a, const SampleSummary& b) {
    if (a.n < 2 || b.n < 2) return DegenerateInput{"each group needs at least two observations"};
    if (a.std < 0 || b.std < 0 || !std::isfinite(a.mean) || !std::isfinite(b.mean)) {
        return DegenerateInput{"standard deviations must be >= 0 and means finite"};
    }
    const double va = a.std * a.std / a.n;
    const double vb = b.std * b.std / b.n;
    const double se2 = va + vb;
    if (se2 == 0.0) {
        // no spread at all: equal means are indistinguishable, different ones are certain
        const double df = a.n + b.n - 2;
        if (a.mean == b.mean) return TestResult{0.0, df, 1.0};
        return TestResult{a.mean < b.mean ? -std::numeric_limits<double>::infinity()
                                          : std::numeric_limits<double>::infinity(),
                          df, 0.0};
    }
    TestResult r;
    r.t = (a.mean - b.mean) / std::sqrt(se2);
    r.df = se2 * se2 / (va * va / (a.n - 1) + vb * vb / (b.n - 1));
    r.pTwoTailed = std::min(1.0, std::max(0.0, student_t_two_tailed_p(r.t, r.df)));
    return r;
}

}  // namespace t2s::tracelab
