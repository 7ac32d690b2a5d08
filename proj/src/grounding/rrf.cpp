#include "t2s/grounding/rrf.hpp"

#include <algorithm>
#include <map>

namespace t2s::grounding {

std::vector<FusedItem> rrf_fuse(const std::vector<std::vector<std::string>>& rankings, double k) {
    std::map<std::string, std::vector<std::size_t>> ranks;
    for (const auto& ranking : rankings) {
        for (std::size_t i = 0; i < ranking.size(); ++i) ranks[ranking[i]].push_back(i + 1);
    }
    std::vector<FusedItem> fused;
    fused.reserve(ranks.size());
    for (auto& [id, rs] : ranks) {
        // Summing in rank order makes the score a function of the rank
        // multiset alone, independent of list order.
        std::sort(rs.begin(), rs.end());
        double score = 0.0;
        for (auto r : rs) score += 1.0 / (k + static_cast<double>(r));
        fused.push_back({id, score});
    }
    std::sort(fused.begin(), fused.end(), [](const FusedItem& a, const FusedItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    return fused;
}

}  // namespace t2s::grounding
