#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "t2s/agent/agent.hpp"
#include "t2s/common/result.hpp"
#include "t2s/grounding/embedding.hpp"
#include "t2s/kg/endpoint.hpp"
#include "t2s/llm/chat.hpp"

namespace t2s::service {

inline constexpr std::chrono::seconds kMaxTotalBudget{600};

struct DatasetConfig {
    std::string id;  // exact URL clients pass as `dataset`
    std::string name;
    kg::EndpointConfig endpoint;
    std::filesystem::path schemaIndex;
    std::map<std::string, std::filesystem::path> entityIndexes;  // language -> directory
    std::string defaultLanguage = "en";
};

struct EmbeddingConfig {
    std::string provider = "hashing";  // "hashing" | "remote"
    std::size_t dimension = grounding::HashingEmbeddingProvider::kDefaultDimension;
    std::uint64_t seed = grounding::HashingEmbeddingProvider::kDefaultSeed;
    grounding::RemoteEmbeddingConfig remote;
};

struct AppConfig {
    std::string listenHost = "0.0.0.0";
    int listenPort = 8000;
    int threads = 8;
    std::vector<DatasetConfig> datasets;
    llm::LlmConfig llm;
    EmbeddingConfig embedding;
    std::chrono::seconds totalBudget = kMaxTotalBudget;
    std::filesystem::path logPath = "runs.jsonl";
    agent::AgentOptions agent;

    const DatasetConfig* find_dataset(const std::string& id) const;
};

struct ConfigErrors {
    std::vector<std::string> problems;

    std::string joined() const;
};

/// Validates a parsed config document. Relative paths resolve against
/// `baseDir`. Every problem is reported, not only the first; index
/// directories must exist.
Result<AppConfig, ConfigErrors> parse_config(const nlohmann::json& doc, const std::filesystem::path& baseDir);

/// Reads a JSON config file. An empty path falls back to $T2S_CONFIG.
Result<AppConfig, ConfigErrors> load_config(const std::filesystem::path& path);

std::unique_ptr<grounding::EmbeddingProvider> make_embedding_provider(const EmbeddingConfig& config);

/// Opens every index and endpoint client named by the config.
Result<std::vector<agent::DatasetRef>, std::string> open_datasets(const AppConfig& config);

}  // namespace t2s::service
