#pragma once

#include <optional>
#include <string>
#include <vector>

#include "toolgate/clustering.hpp"
#include "toolgate/embedding.hpp"
#include "toolgate/tool_spec.hpp"

namespace toolgate {

enum class QueryOrigin { seed, generated };

/// A corpus query used to build the Level-2 cluster space.
struct AugmentedQuery {
    std::string id;
    std::string text;
    std::string category;
    std::vector<std::string> gold_tools;
    QueryOrigin origin = QueryOrigin::seed;
    std::optional<double> rouge_vs_seed;  // generated only

    bool operator==(const AugmentedQuery& other) const = default;
};

struct Level1Entry {
    std::string tool_id;
    Embedding embedding;

    bool operator==(const Level1Entry& other) const = default;
};

/// Immutable per-tool search structure (one embedding per tool).
struct Level1Index {
    std::vector<Level1Entry> entries;
    std::size_t dim = 0;
    std::string embedder_fingerprint;

    bool operator==(const Level1Index& other) const = default;
};

struct ToolCluster {
    std::string id;
    std::vector<std::string> member_query_ids;
    Embedding centroid;                 // normalized mean of member embeddings
    std::vector<std::string> tool_ids;  // union of member gold_tools, sorted

    bool operator==(const ToolCluster& other) const = default;
};

/// Immutable cluster-level search structure over the augmented corpus.
struct Level2Index {
    std::vector<ToolCluster> clusters;
    std::string linkage = "average";
    double distance_threshold = 0.5;
    std::size_t dim = 0;
    std::string embedder_fingerprint;

    bool operator==(const Level2Index& other) const = default;
};

/// Embeds "name: description" for every tool. Throws DuplicateToolId,
/// EmptyInput; embedder failures propagate.
Level1Index build_level1(const std::vector<ToolSpec>& tools, const Embedder& embedder);

/// Embeds every corpus query, clusters them, and derives one ToolCluster per
/// label. Throws UnknownToolId when a gold tool does not resolve.
Level2Index build_level2(const std::vector<AugmentedQuery>& corpus,
                         const std::vector<ToolSpec>& tools, const Embedder& embedder,
                         double distance_threshold);

// Persistence: single JSON document with schema_version, kind, checksum over
// the payload, floats in round-trippable decimal. load(save(x)) == x exactly.
void save_index(const Level1Index& index, const std::string& path);
void save_index(const Level2Index& index, const std::string& path);
Level1Index load_level1(const std::string& path);
Level2Index load_level2(const std::string& path);

constexpr int kIndexSchemaVersion = 1;

// Corpus files are JSONL, one AugmentedQuery per line.
std::vector<AugmentedQuery> load_corpus_jsonl(const std::string& path);
void save_corpus_jsonl(const std::vector<AugmentedQuery>& corpus, const std::string& path);

}  // namespace toolgate
