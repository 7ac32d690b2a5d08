#pragma once

// Brute-force reference implementations used by property tests and the
// acceptance binary. They favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "t2s/common/action_kind.hpp"
#include "t2s/common/text.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// Reciprocal rank fusion with exact rational scores.

struct Fraction {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    void add_reciprocal(std::uint64_t d) {
        // num/den + 1/d
        num = num * d + den;
        den = den * d;
        const auto g = std::gcd(num, den);
        num /= g;
        den /= g;
    }
};

inline bool greater(const Fraction& a, const Fraction& b) {
    return a.num * b.den > b.num * a.den;
}

inline bool equal(const Fraction& a, const Fraction& b) {
    return a.num * b.den == b.num * a.den;
}

inline std::vector<std::string> rrf_order(const std::vector<std::vector<std::string>>& rankings, std::uint64_t k) {
    std::map<std::string, Fraction> score;
    for (const auto& list : rankings) {
        for (std::size_t i = 0; i < list.size(); ++i) score[list[i]].add_reciprocal(k + i + 1);
    }
    std::vector<std::string> ids;
    for (const auto& [id, s] : score) ids.push_back(id);
    std::sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
        if (!equal(score[a], score[b])) return greater(score[a], score[b]);
        return a < b;
    });
    return ids;
}

/// Up to 3 rankings over a pool of up to 10 documents.
inline std::vector<std::vector<std::string>> random_rankings(std::mt19937& rng) {
    const int docs = 1 + static_cast<int>(rng() % 10);
    const int lists = static_cast<int>(rng() % 4);
    std::vector<std::string> pool;
    for (int i = 0; i < docs; ++i) pool.push_back("http://ex.org/doc" + std::to_string(i));
    std::vector<std::vector<std::string>> out;
    for (int l = 0; l < lists; ++l) {
        auto list = pool;
        std::shuffle(list.begin(), list.end(), rng);
        list.resize(rng() % (pool.size() + 1));
        out.push_back(std::move(list));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Field-weighted BM25 by full scan.

struct Doc {
    std::string iri;
    std::string name;
    std::optional<std::string> description;
};

inline const std::vector<std::string>& vocabulary() {
    static const std::vector<std::string> words = {"berlin", "wall", "city", "east", "river", "alpha",
                                                   "beta", "gamma", "port", "capital", "old", "new"};
    return words;
}

inline std::string random_words(std::mt19937& rng, int count) {
    std::string out;
    for (int i = 0; i < count; ++i) {
        if (!out.empty()) out += ' ';
        out += vocabulary()[rng() % vocabulary().size()];
    }
    return out;
}

inline std::vector<Doc> random_corpus(std::mt19937& rng, int size) {
    std::set<int> ids;
    while (static_cast<int>(ids.size()) < size) ids.insert(static_cast<int>(rng() % 100000));
    std::vector<Doc> docs;
    for (int id : ids) {
        Doc d{"http://ex.org/e" + std::to_string(id), random_words(rng, 1 + static_cast<int>(rng() % 3)), {}};
        if (rng() % 3 != 0) d.description = random_words(rng, 1 + static_cast<int>(rng() % 6));
        docs.push_back(std::move(d));
    }
    std::shuffle(docs.begin(), docs.end(), rng);
    return docs;
}

inline std::string random_query(std::mt19937& rng) {
    std::string q = random_words(rng, 1 + static_cast<int>(rng() % 5));
    if (rng() % 10 == 0) q += " unknownterm";
    return q;
}

inline std::vector<std::string> bm25_order(const std::vector<Doc>& docs, const std::string& query,
                                           double k1 = 1.2, double b = 0.75) {
    const double n = static_cast<double>(docs.size());
    std::vector<std::vector<std::string>> names;
    std::vector<std::vector<std::string>> descs;
    std::uint64_t totalName = 0;
    std::uint64_t totalDesc = 0;
    for (const auto& d : docs) {
        names.push_back(t2s::text::tokenize(d.name));
        descs.push_back(d.description ? t2s::text::tokenize(*d.description) : std::vector<std::string>{});
        totalName += names.back().size();
        totalDesc += descs.back().size();
    }
    const double avg = static_cast<double>(2 * totalName + totalDesc) / n;
    const auto qTokens = t2s::text::tokenize(query);
    const std::set<std::string> terms(qTokens.begin(), qTokens.end());

    std::vector<double> score(docs.size(), 0.0);
    for (const auto& term : terms) {
        std::vector<double> tf(docs.size(), 0.0);
        double df = 0;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            const auto inName = std::count(names[i].begin(), names[i].end(), term);
            const auto inDesc = std::count(descs[i].begin(), descs[i].end(), term);
            tf[i] = 2.0 * static_cast<double>(inName) + static_cast<double>(inDesc);
            if (tf[i] > 0) ++df;
        }
        if (df == 0) continue;
        const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        for (std::size_t i = 0; i < docs.size(); ++i) {
            if (tf[i] == 0) continue;
            const double len = 2.0 * static_cast<double>(names[i].size()) + static_cast<double>(descs[i].size());
            score[i] += idf * (tf[i] * (k1 + 1.0)) / (tf[i] + k1 * (1.0 - b + b * (len / avg)));
        }
    }
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (score[i] > 0) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (score[x] != score[y]) return score[x] > score[y];
        return docs[x].iri < docs[y].iri;
    });
    std::vector<std::string> out;
    for (auto i : order) out.push_back(docs[i].iri);
    return out;
}

// ---------------------------------------------------------------------------
// Controller output generator: arguments with balanced parentheses, quotes and
// line breaks, built from SPARQL-ish fragments. Arguments never start or end
// with whitespace or a quote, which the parser would strip.

inline std::string random_balanced_argument(std::mt19937& rng, int depth = 0) {
    static const std::vector<std::string> words{
        "SELECT", "?x", "?count", "WHERE", "{", "}", ".", ";", ",", "FILTER", "CONTAINS", "LCASE",
        "\"Barack Obama\"", "'it''s'", "\"a (quoted) paren\"", "<http://dbpedia.org/resource/Sufism>",
        "dbo:populationTotal", "!=", "&&", "LIMIT", "10", "Apple", "hasLocation", "\n", "\n  ", "\t",
    };
    std::uniform_int_distribution<int> count(1, 8);
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::uniform_int_distribution<int> coin(0, 3);
    std::string out = depth == 0 ? "Q" : "";
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        if (depth < 4 && coin(rng) == 0) {
            out += "(" + random_balanced_argument(rng, depth + 1) + ")";
        } else {
            const auto& w = words[pick(rng)];
            if (!out.empty() && out.back() != '\n' && w[0] != '\n' && w[0] != '\t') out += ' ';
            out += w;
        }
    }
    if (depth == 0) out += " Z";
    return out;
}

struct GeneratedDecision {
    std::string text;
    std::string thought;
    t2s::ActionKind kind;
    std::string argument;
};

inline GeneratedDecision random_controller_output(std::mt19937& rng) {
    std::uniform_int_distribution<std::size_t> kindPick(0, t2s::kAllActionKinds.size() - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    GeneratedDecision d;
    d.kind = t2s::kAllActionKinds[kindPick(rng)];
    d.argument = d.kind == t2s::ActionKind::Stop ? "" : random_balanced_argument(rng);
    if (coin(rng) == 1) {
        d.thought = "I should look at " + random_words(rng, 3) + " (then " + random_words(rng, 2) + ")";
        d.text = "Thought: " + d.thought + "\n";
    }
    d.text += "Action: " + std::string(t2s::to_string(d.kind)) + "(" + d.argument + ")";
    return d;
}

}  // namespace oracles
