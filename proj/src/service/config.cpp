#include "t2s/service/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "t2s/common/http_client.hpp"
#include "t2s/grounding/entity_index.hpp"
#include "t2s/grounding/schema_index.hpp"

namespace t2s::service {

namespace fs = std::filesystem;
using nlohmann::json;

const DatasetConfig* AppConfig::find_dataset(const std::string& id) const {
    for (const auto& d : datasets) {
        if (d.id == id) return &d;
    }
    return nullptr;
}

std::string ConfigErrors::joined() const {
    std::string out;
    for (const auto& p : problems) out += (out.empty() ? "" : "\n") + p;
    return out;
}

namespace {

// Typed field access that records a problem instead of throwing.
class Fields {
public:
    Fields(const json& obj, std::string path, std::vector<std::string>& problems)
        : obj_(obj), path_(std::move(path)), problems_(problems) {}

    std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const char* key) const { return obj_.is_object() && obj_.contains(key) && !obj_[key].is_null(); }
    const json& at(const char* key) const { return obj_[key]; }

    void string(const char* key, std::string& out, bool required = false) const {
        if (!has(key)) {
            if (required) problems_.push_back(name(key) + " is missing");
            return;
        }
        if (!obj_[key].is_string()) {
            problems_.push_back(name(key) + " must be a string");
            return;
        }
        out = obj_[key].get<std::string>();
        if (required && out.empty()) problems_.push_back(name(key) + " is missing");
    }

    template <class T>
    void number(const char* key, T& out) const {
        if (!has(key)) return;
        if (!obj_[key].is_number()) {
            problems_.push_back(name(key) + " must be a number");
            return;
        }
        if constexpr (std::is_integral_v<T>) {
            if (!obj_[key].is_number_integer() || (std::is_unsigned_v<T> && obj_[key].get<double>() < 0)) {
                problems_.push_back(name(key) + " must be a non-negative integer");
                return;
            }
        }
        out = obj_[key].get<T>();
    }

    void seconds(const char* key, std::chrono::milliseconds& out) const {
        double s = -1;
        if (!has(key)) return;
        number(key, s);
        if (s <= 0) {
            problems_.push_back(name(key) + " must be positive");
            return;
        }
        out = std::chrono::milliseconds(static_cast<long long>(s * 1000.0));
    }

private:
    const json& obj_;
    std::string path_;
    std::vector<std::string>& problems_;
};

fs::path resolve(const fs::path& baseDir, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : baseDir / path;
}

std::string default_name(const std::string& id) {
    std::string s = id;
    while (!s.empty() && s.back() == '/') s.pop_back();
    const auto slash = s.rfind('/');
    return slash == std::string::npos ? s : s.substr(slash + 1);
}

DatasetConfig parse_dataset(const json& doc, const std::string& path, const fs::path& baseDir,
                            std::vector<std::string>& problems) {
    DatasetConfig d;
    Fields f(doc, path, problems);
    if (!doc.is_object()) {
        problems.push_back(path + " must be an object");
        return d;
    }
    f.string("id", d.id, true);
    if (!d.id.empty() && !http::parse_url(d.id)) problems.push_back(f.name("id") + " is not an http(s) URL: " + d.id);
    f.string("name", d.name);
    if (d.name.empty()) d.name = default_name(d.id);

    f.string("endpoint", d.endpoint.queryUrl, true);
    if (!d.endpoint.queryUrl.empty() && !http::parse_url(d.endpoint.queryUrl)) {
        problems.push_back(f.name("endpoint") + " is not an http(s) URL: " + d.endpoint.queryUrl);
    }
    f.seconds("endpointTimeoutSeconds", d.endpoint.requestTimeout);

    std::string schema;
    f.string("schemaIndex", schema, true);
    if (!schema.empty()) {
        d.schemaIndex = resolve(baseDir, schema);
        if (!fs::exists(d.schemaIndex / "manifest.json")) {
            problems.push_back(f.name("schemaIndex") + ": no index at " + d.schemaIndex.string());
        }
    }

    if (!f.has("entityIndexes") || !f.at("entityIndexes").is_object() || f.at("entityIndexes").empty()) {
        problems.push_back(f.name("entityIndexes") + " must map at least one language to an index directory");
    } else {
        for (const auto& [lang, dir] : f.at("entityIndexes").items()) {
            if (!dir.is_string()) {
                problems.push_back(f.name("entityIndexes") + "." + lang + " must be a string");
                continue;
            }
            auto p = resolve(baseDir, dir.get<std::string>());
            if (!fs::exists(p / "manifest.json")) {
                problems.push_back(f.name("entityIndexes") + "." + lang + ": no index at " + p.string());
            }
            d.entityIndexes[lang] = p;
        }
    }
    f.string("defaultLanguage", d.defaultLanguage);
    if (!d.entityIndexes.empty() && d.entityIndexes.count(d.defaultLanguage) == 0) {
        problems.push_back(f.name("defaultLanguage") + " \"" + d.defaultLanguage + "\" has no entity index");
    }
    return d;
}

}  // namespace

Result<AppConfig, ConfigErrors> parse_config(const json& doc, const fs::path& baseDir) {
    std::vector<std::string> problems;
    AppConfig c;
    if (!doc.is_object()) return ConfigErrors{{"config must be a JSON object"}};
    Fields root(doc, "", problems);

    std::string listen;
    root.string("listen", listen);
    if (!listen.empty()) {
        const auto colon = listen.rfind(':');
        int port = -1;
        if (colon != std::string::npos) {
            try {
                port = std::stoi(listen.substr(colon + 1));
            } catch (const std::exception&) {
                port = -1;
            }
        }
        if (colon == std::string::npos || port < 0 || port > 65535) {
            problems.push_back("listen must look like host:port, got " + listen);
        } else {
            c.listenHost = listen.substr(0, colon);
            c.listenPort = port;
        }
    }
    root.number("threads", c.threads);
    if (c.threads < 1) problems.push_back("threads must be at least 1");

    double budget = static_cast<double>(c.totalBudget.count());
    root.number("totalBudgetSeconds", budget);
    if (budget <= 0) {
        problems.push_back("totalBudgetSeconds must be positive");
    } else if (budget > static_cast<double>(kMaxTotalBudget.count())) {
        problems.push_back("totalBudgetSeconds must be at most 600 (the ten-minute limit), got " + json(budget).dump());
    } else {
        c.totalBudget = std::chrono::seconds(static_cast<long long>(budget));
    }

    std::string logPath;
    root.string("logPath", logPath);
    c.logPath = resolve(baseDir, logPath.empty() ? c.logPath.string() : logPath);

    const json emptyObject = json::object();
    {
        const json& llmDoc = root.has("llm") ? doc["llm"] : emptyObject;
        if (!root.has("llm")) problems.push_back("llm section is missing");
        Fields f(llmDoc, "llm", problems);
        f.string("baseUrl", c.llm.baseUrl);
        f.string("model", c.llm.model);
        f.string("apiKeyEnv", c.llm.apiKeyEnvVar);
        f.number("temperature", c.llm.temperature);
        f.number("maxOutputTokens", c.llm.maxOutputTokens);
        f.seconds("requestTimeoutSeconds", c.llm.requestTimeout);
        for (auto& p : llm::validate(c.llm)) problems.push_back(std::move(p));
    }

    if (root.has("embedding")) {
        Fields f(doc["embedding"], "embedding", problems);
        f.string("provider", c.embedding.provider);
        f.number("dimension", c.embedding.dimension);
        f.number("seed", c.embedding.seed);
        if (c.embedding.provider == "remote") {
            f.string("baseUrl", c.embedding.remote.baseUrl, true);
            f.string("model", c.embedding.remote.model, true);
            f.string("apiKeyEnv", c.embedding.remote.apiKeyEnvVar);
            f.seconds("requestTimeoutSeconds", c.embedding.remote.requestTimeout);
            f.number("batchSize", c.embedding.remote.batchSize);
        } else if (c.embedding.provider != "hashing") {
            problems.push_back("embedding.provider must be \"hashing\" or \"remote\"");
        }
        if (c.embedding.dimension == 0) problems.push_back("embedding.dimension must be positive");
    }

    if (root.has("agent")) {
        Fields f(doc["agent"], "agent", problems);
        auto& a = c.agent;
        f.number("maxIterations", a.maxIterations);
        f.number("parseRetries", a.parseRetries);
        f.number("searchResults", a.searchResults);
        f.number("excerptEdges", a.excerptEdges);
        f.number("resultRows", a.resultRows);
        f.number("maxObservationChars", a.maxObservationChars);
        double reserve = -1;
        f.number("budgetReserveSeconds", reserve);
        if (f.has("budgetReserveSeconds")) {
            if (reserve < 0) {
                problems.push_back("agent.budgetReserveSeconds must be >= 0");
            } else {
                a.budgetReserve = std::chrono::milliseconds(static_cast<long long>(reserve * 1000.0));
            }
        }
        if (a.maxIterations == 0) problems.push_back("agent.maxIterations must be at least 1");
        if (a.maxObservationChars < 500) problems.push_back("agent.maxObservationChars must be at least 500");
    }
    if (c.agent.budgetReserve >= c.totalBudget) {
        problems.push_back("agent.budgetReserveSeconds must be smaller than totalBudgetSeconds");
    }

    if (!root.has("datasets") || !doc["datasets"].is_array() || doc["datasets"].empty()) {
        problems.push_back("datasets must list at least one dataset");
    } else {
        std::set<std::string> seen;
        for (std::size_t i = 0; i < doc["datasets"].size(); ++i) {
            auto d = parse_dataset(doc["datasets"][i], "datasets[" + std::to_string(i) + "]", baseDir, problems);
            if (!d.id.empty() && !seen.insert(d.id).second) problems.push_back("dataset id listed twice: " + d.id);
            c.datasets.push_back(std::move(d));
        }
    }

    if (!problems.empty()) return ConfigErrors{std::move(problems)};
    return c;
}

Result<AppConfig, ConfigErrors> load_config(const fs::path& path) {
    fs::path file = path;
    if (file.empty()) {
        const char* env = std::getenv("T2S_CONFIG");
        if (env == nullptr || *env == '\0') return ConfigErrors{{"no config file given and T2S_CONFIG is not set"}};
        file = env;
    }
    std::ifstream in(file);
    if (!in) return ConfigErrors{{"cannot read config file " + file.string()}};
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto doc = json::parse(buffer.str(), nullptr, false, true);
    if (doc.is_discarded()) return ConfigErrors{{"config file " + file.string() + " is not valid JSON"}};
    return parse_config(doc, fs::absolute(file).parent_path());
}

std::unique_ptr<grounding::EmbeddingProvider> make_embedding_provider(const EmbeddingConfig& config) {
    if (config.provider == "remote") return std::make_unique<grounding::RemoteEmbeddingProvider>(config.remote);
    return std::make_unique<grounding::HashingEmbeddingProvider>(config.dimension, config.seed);
}

Result<std::vector<agent::DatasetRef>, std::string> open_datasets(const AppConfig& config) {
    std::vector<agent::DatasetRef> out;
    for (const auto& d : config.datasets) {
        agent::DatasetRef ref;
        ref.id = d.id;
        ref.name = d.name;
        ref.defaultLanguage = d.defaultLanguage;
        ref.graph = std::make_shared<kg::SparqlClient>(d.endpoint);
        auto schema = grounding::SchemaIndex::load(d.schemaIndex);
        if (!schema) return d.id + ": cannot load schema index: " + schema.error().message;
        ref.schemaIndex = std::make_shared<const grounding::SchemaIndex>(std::move(schema).value());
        for (const auto& [lang, dir] : d.entityIndexes) {
            auto index = grounding::EntityIndex::open(dir);
            if (!index) return d.id + ": cannot open " + lang + " entity index: " + index.error().message;
            ref.entityIndexByLanguage[lang] = std::make_shared<const grounding::EntityIndex>(std::move(index).value());
        }
        out.push_back(std::move(ref));
    }
    return out;
}

}  // namespace t2s::service
