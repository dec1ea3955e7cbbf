#pragma once

#include <string>
#include <vector>

#include "toolgate/embedding.hpp"
#include "toolgate/llm_client.hpp"

namespace toolgate {

/// An LLM-imagined tool: what the model believes it needs, before any real
/// tool is looked up.
struct IdealTool {
    std::string name;         // <= 64 chars after truncation
    std::string description;  // <= 1024 chars after truncation

    bool operator==(const IdealTool& other) const = default;
};

struct RecommenderOutput {
    std::string query_text;
    std::vector<IdealTool> ideal_tools;  // 1..8
    std::string raw_response;            // audit trail
    long prompt_tokens = 0;              // summed over the 1-2 chat calls
    bool tokens_estimated = false;
};

constexpr std::size_t kMaxIdealTools = 8;
constexpr std::size_t kMaxIdealNameLen = 64;
constexpr std::size_t kMaxIdealDescriptionLen = 1024;

/// The built-in template (generated from assets/recommender_prompt.txt).
std::string default_recommender_template();

/// Substitutes the query into the template. The prompt carries no tool
/// definitions. Throws EmptyQuery.
std::string build_recommender_prompt(const std::string& query);
std::string build_recommender_prompt(const std::string& query,
                                     const std::string& template_text);

/// Pulls {"tools":[{"name","description"}]} out of free-form model output,
/// tolerating prose and code fences. Malformed entries are skipped; fields
/// are truncated; the list is capped at 8. Throws NoJsonFound /
/// EmptyToolList / MalformedEntry.
std::vector<IdealTool> parse_recommendation(const std::string& raw);

struct RecommendOptions {
    std::string model;
    std::string template_text;  // empty = built-in default
    int context_window = 8192;
};

/// One chat call with NO tool schemas attached, one retry with a
/// JSON-format reminder, then RecommenderFailed. Transport errors
/// (Unreachable/Timeout/HttpError) propagate.
RecommenderOutput recommend(const std::string& query, LlmClient& llm,
                            const RecommendOptions& options = {});

/// One embedding per ideal tool from "<query_text> || <name>: <description>".
std::vector<Embedding> embed_recommendation(const RecommenderOutput& output,
                                            const Embedder& embedder);

}  // namespace toolgate
