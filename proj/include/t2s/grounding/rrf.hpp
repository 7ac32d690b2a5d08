#pragma once

#include <string>
#include <vector>

namespace t2s::grounding {

inline constexpr double kDefaultRrfK = 60.0;

struct FusedItem {
    std::string id;
    double score = 0.0;
};

/// Reciprocal rank fusion: score(d) = sum over rankings containing d of
/// 1/(k + rank), rank starting at 1. Sorted by score descending, then id.
/// Each ranking must list distinct ids.
std::vector<FusedItem> rrf_fuse(const std::vector<std::vector<std::string>>& rankings, double k = kDefaultRrfK);

}  // namespace t2s::grounding
