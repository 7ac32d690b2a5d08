#include "mini_dbpedia.hpp"

#include <unistd.h>

#include <atomic>
#include <stdexcept>

#include "t2s/grounding/build.hpp"

namespace t2s::testkit {

namespace fs = std::filesystem;

MiniDbpedia::MiniDbpedia() {
    static std::atomic<int> counter{0};
    TripleStore store;
    store.load_ntriples_file(fixture_path("mini_dbpedia.nt"));
    endpoint_ = std::make_unique<SparqlFixture>(std::move(store));

    root_ = fs::temp_directory_path() /
            ("t2s-mini-dbpedia-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(root_);
    fs::create_directories(root_);

    kg::EndpointConfig cfg;
    cfg.queryUrl = endpoint_->endpoint_url();
    cfg.requestTimeout = std::chrono::seconds(5);
    auto client = std::make_shared<kg::SparqlClient>(cfg);

    auto schema = grounding::build_schema_index_from_graph(*client, embedder_, root_ / "schema");
    if (!schema) throw std::runtime_error(schema.error());
    auto loaded = grounding::SchemaIndex::load(root_ / "schema");
    if (!loaded) throw std::runtime_error(loaded.error().message);

    dataset_.id = kDbpediaDatasetId;
    dataset_.name = "DBpedia";
    dataset_.graph = client;
    dataset_.schemaIndex = std::make_shared<const grounding::SchemaIndex>(std::move(loaded).value());
    for (const std::string lang : {"en", "es"}) {
        const auto dir = root_ / ("entities-" + lang);
        auto built = grounding::build_entity_index_from_graph(*client, lang, dir);
        if (!built) throw std::runtime_error(built.error());
        auto index = grounding::EntityIndex::open(dir);
        if (!index) throw std::runtime_error(index.error().message);
        dataset_.entityIndexByLanguage[lang] = std::make_shared<const grounding::EntityIndex>(std::move(index).value());
    }
    dataset_.defaultLanguage = "en";
}

MiniDbpedia::~MiniDbpedia() {
    std::error_code ec;
    fs::remove_all(root_, ec);
}

std::vector<std::string> happy_path_script() {
    return {
        "Thought: I need the URI of Berlin first.\nAction: search_entity_by_label(Berlin)",
        "Thought: Now the property that holds the population.\nAction: search_property_by_label(population)",
        "Thought: Berlin plus dbo:populationTotal should give the number.\nAction: execute_sparql(" +
            kBerlinPopulationQuery + ")",
        "Thought: The query returns the population literal.\nAction: stop()",
    };
}

}  // namespace t2s::testkit
