#include "t2s/grounding/build.hpp"

namespace t2s::grounding {

namespace {

std::string harvest_failure(const kg::HarvestError& e) {
    return "harvest failed after " + std::to_string(e.progress) + " items (" + std::string(kg::to_string(e.cause.kind)) +
           "): " + e.cause.message;
}

std::string describe(const GroundingError& e) { return std::string(to_string(e.kind)) + ": " + e.message; }

}  // namespace

Result<std::size_t, std::string> build_schema_index_from_graph(kg::SparqlClient& client, EmbeddingProvider& provider,
                                                               const std::filesystem::path& dir,
                                                               const kg::HarvestOptions& harvest) {
    auto docs = kg::harvest_schema(client, harvest);
    if (!docs) return harvest_failure(docs.error());
    auto index = SchemaIndex::build(std::move(docs).value(), provider);
    if (!index) return "schema index build failed: " + describe(index.error());
    auto saved = index->save(dir);
    if (!saved) return "schema index save failed: " + describe(saved.error());
    return index->size();
}

Result<EntityIndexBuildReport, std::string> build_entity_index_from_graph(kg::SparqlClient& client,
                                                                          const std::optional<std::string>& language,
                                                                          const std::filesystem::path& dir,
                                                                          const EntityIndexOptions& options,
                                                                          const kg::HarvestOptions& harvest) {
    EntityIndexBuilder builder(dir, options);
    auto harvested = kg::harvest_entities(
        client, language, [&](const kg::HarvestedEntity& e) { builder.add({e.iri, e.label, e.comment}); }, harvest);
    if (!harvested) return harvest_failure(harvested.error());
    auto report = builder.finish();
    if (!report) return "entity index build failed: " + describe(report.error());
    return std::move(report).value();
}

}  // namespace t2s::grounding
