#pragma once

#include <optional>
#include <string>

#include "t2s/kg/rdf.hpp"

namespace t2s::grounding {

/// One ranked retrieval hit. `kind` is a schema kind name or "instance".
struct ScoredMatch {
    kg::Iri iri;
    std::string label;
    std::string kind;
    double score = 0.0;
    std::optional<std::size_t> denseRank;
    std::optional<std::size_t> sparseRank;
    std::optional<kg::Iri> domain;
    std::optional<kg::Iri> range;
    std::optional<std::string> description;
};

}  // namespace t2s::grounding
