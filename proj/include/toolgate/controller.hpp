#pragma once

#include <string>
#include <vector>

#include "toolgate/index.hpp"
#include "toolgate/llm_client.hpp"
#include "toolgate/recommender.hpp"

namespace toolgate {

struct KnnHit {
    std::string target_id;  // tool id (L1) or cluster id (L2)
    double score = 0.0;     // cosine, in [-1, 1]
    int rank = 0;           // 1-based, scores non-increasing with rank
};

enum class SearchLevel { L1, L2, L3 };
enum class DecisionReason {
    score_arbitration,
    low_confidence_floor,
    recommender_failed,
    execution_fallback,
    all_tools_mode,  // harness baseline: the controller was bypassed
};

const char* search_level_name(SearchLevel level);
const char* decision_reason_name(DecisionReason reason);
SearchLevel search_level_from_name(const std::string& name);
DecisionReason decision_reason_from_name(const std::string& name);

struct ControllerDecision {
    SearchLevel level = SearchLevel::L3;
    std::vector<std::string> selected_tool_ids;
    double avg_score_l1 = 0.0;
    double avg_score_l2 = 0.0;
    int k = 0;
    DecisionReason reason = DecisionReason::score_arbitration;
};

/// Exact top-min(k, |index|) by cosine; ties broken by lexicographic
/// target_id; sorted descending. Throws EmptyIndex / DimensionMismatch.
std::vector<KnnHit> knn(const Embedding& query_vec, const Level1Index& index, int k);
std::vector<KnnHit> knn(const Embedding& query_vec, const Level2Index& index, int k);

struct LevelScores {
    double avg_l1 = 0.0;
    double avg_l2 = 0.0;
    std::vector<std::vector<KnnHit>> hits_l1;  // per recommendation vector
    std::vector<std::vector<KnnHit>> hits_l2;
};

/// Per level: knn for each recommendation vector, pool every hit score,
/// average over all (rec_vec x top-k) pairs.
LevelScores score_levels(const std::vector<Embedding>& rec_vecs, const Level1Index& l1,
                         const Level2Index& l2, int k);

struct LevelChoice {
    SearchLevel level;
    DecisionReason reason;
};

/// L3 when max(avg_l1, avg_l2) < floor; otherwise the higher average, with
/// exact ties going to L1 (fewer tools presented).
LevelChoice select_level(double avg_l1, double avg_l2, double floor = 0.5);

/// L1: union of top-k tool hits across rec_vecs, ordered by descending
/// score (first seen wins). L2: union of each rec_vec's top-1 cluster's
/// tools, clusters ordered by descending score. L3: all tools in input
/// order. Always deduplicated.
std::vector<std::string> assemble_toolset(SearchLevel level,
                                          const std::vector<std::vector<KnnHit>>& hits_l1,
                                          const std::vector<std::vector<KnnHit>>& hits_l2,
                                          const Level2Index& l2,
                                          const std::vector<ToolSpec>& tools);

enum class RunMode { lis, all_tools };

struct RunConfig {
    RunMode mode = RunMode::lis;
    int k = 5;
    double floor = 0.5;
    int reduced_context_window = 8192;  // L1/L2 calls
    int full_context_window = 16384;    // L3 calls
    std::string model;
    std::string recommender_template;  // empty = built-in
};

struct StageTimings {
    double recommend_s = 0.0;
    double embed_s = 0.0;
    double search_s = 0.0;
    double call_s = 0.0;
    double total_s = 0.0;
};

struct QueryRunResult {
    ControllerDecision decision;
    ChatResponse response;  // final function-calling response (post-fallback)
    StageTimings timings;
    long prompt_tokens = 0;  // summed over every LLM call in the pipeline
    bool tokens_estimated = false;
    double start_unix_s = 0.0;
    double end_unix_s = 0.0;
};

/// Full pipeline: recommend -> embed -> score -> select -> assemble ->
/// function call, with the Level-3 fallbacks (recommender failure, low
/// confidence, execution error sentinel). Transport errors are fatal and
/// propagate; every other stage failure degrades to Level 3.
QueryRunResult run_query(const std::string& query, const Level1Index& l1,
                         const Level2Index& l2, const std::vector<ToolSpec>& tools,
                         LlmClient& llm, const Embedder& embedder, const RunConfig& config);

}  // namespace toolgate
