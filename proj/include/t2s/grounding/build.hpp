#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "t2s/common/result.hpp"
#include "t2s/grounding/embedding.hpp"
#include "t2s/grounding/entity_index.hpp"
#include "t2s/grounding/schema_index.hpp"
#include "t2s/kg/endpoint.hpp"

namespace t2s::grounding {

// Harvest-and-index pipelines behind the build commands. Errors are
// human-readable messages.

Result<std::size_t, std::string> build_schema_index_from_graph(kg::SparqlClient& client, EmbeddingProvider& provider,
                                                               const std::filesystem::path& dir,
                                                               const kg::HarvestOptions& harvest = {});

Result<EntityIndexBuildReport, std::string> build_entity_index_from_graph(
    kg::SparqlClient& client, const std::optional<std::string>& language, const std::filesystem::path& dir,
    const EntityIndexOptions& options = {}, const kg::HarvestOptions& harvest = {});

}  // namespace t2s::grounding
