#include "toolgate/controller.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_set>

namespace toolgate {

const char* search_level_name(SearchLevel level) {
    switch (level) {
        case SearchLevel::L1: return "L1";
        case SearchLevel::L2: return "L2";
        case SearchLevel::L3: return "L3";
    }
    return "L3";
}

const char* decision_reason_name(DecisionReason reason) {
    switch (reason) {
        case DecisionReason::score_arbitration: return "score-arbitration";
        case DecisionReason::low_confidence_floor: return "low-confidence-floor";
        case DecisionReason::recommender_failed: return "recommender-failed";
        case DecisionReason::execution_fallback: return "execution-fallback";
        case DecisionReason::all_tools_mode: return "all-tools-mode";
    }
    return "score-arbitration";
}

SearchLevel search_level_from_name(const std::string& name) {
    if (name == "L1") return SearchLevel::L1;
    if (name == "L2") return SearchLevel::L2;
    if (name == "L3") return SearchLevel::L3;
    throw Error(ErrorCode::SchemaError, "unknown search level '" + name + "'");
}

DecisionReason decision_reason_from_name(const std::string& name) {
    if (name == "score-arbitration") return DecisionReason::score_arbitration;
    if (name == "low-confidence-floor") return DecisionReason::low_confidence_floor;
    if (name == "recommender-failed") return DecisionReason::recommender_failed;
    if (name == "execution-fallback") return DecisionReason::execution_fallback;
    if (name == "all-tools-mode") return DecisionReason::all_tools_mode;
    throw Error(ErrorCode::SchemaError, "unknown decision reason '" + name + "'");
}

namespace {

struct Entry {
    const std::string* id;
    const Embedding* embedding;
};

std::vector<KnnHit> knn_over_entries(const Embedding& query_vec,
                                     const std::vector<Entry>& entries, int k,
                                     std::size_t index_dim) {
    if (k < 1) {
        throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    }
    if (entries.empty()) {
        throw Error(ErrorCode::EmptyIndex, "knn over an empty index");
    }
    if (query_vec.dim() != index_dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "query dim " + std::to_string(query_vec.dim()) + " vs index dim " +
                        std::to_string(index_dim));
    }

    std::vector<KnnHit> hits;
    hits.reserve(entries.size());
    for (const auto& entry : entries) {
        hits.push_back({*entry.id, cosine_similarity(query_vec, *entry.embedding), 0});
    }
    auto better = [](const KnnHit& a, const KnnHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.target_id < b.target_id;
    };
    std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), hits.size());
    std::partial_sort(hits.begin(), hits.begin() + take, hits.end(), better);
    hits.resize(take);
    for (std::size_t i = 0; i < hits.size(); ++i) hits[i].rank = static_cast<int>(i + 1);
    return hits;
}

}  // namespace

std::vector<KnnHit> knn(const Embedding& query_vec, const Level1Index& index, int k) {
    std::vector<Entry> entries;
    entries.reserve(index.entries.size());
    for (const auto& entry : index.entries) {
        entries.push_back({&entry.tool_id, &entry.embedding});
    }
    return knn_over_entries(query_vec, entries, k, index.dim);
}

std::vector<KnnHit> knn(const Embedding& query_vec, const Level2Index& index, int k) {
    std::vector<Entry> entries;
    entries.reserve(index.clusters.size());
    for (const auto& cluster : index.clusters) {
        entries.push_back({&cluster.id, &cluster.centroid});
    }
    return knn_over_entries(query_vec, entries, k, index.dim);
}

LevelScores score_levels(const std::vector<Embedding>& rec_vecs, const Level1Index& l1,
                         const Level2Index& l2, int k) {
    if (rec_vecs.empty()) {
        throw Error(ErrorCode::EmptyInput, "no recommendation vectors to score");
    }
    LevelScores scores;
    double sum_l1 = 0.0, sum_l2 = 0.0;
    std::size_t count_l1 = 0, count_l2 = 0;
    for (const auto& vec : rec_vecs) {
        auto hits1 = knn(vec, l1, k);
        auto hits2 = knn(vec, l2, k);
        for (const auto& hit : hits1) {
            sum_l1 += hit.score;
            ++count_l1;
        }
        for (const auto& hit : hits2) {
            sum_l2 += hit.score;
            ++count_l2;
        }
        scores.hits_l1.push_back(std::move(hits1));
        scores.hits_l2.push_back(std::move(hits2));
    }
    scores.avg_l1 = sum_l1 / static_cast<double>(count_l1);
    scores.avg_l2 = sum_l2 / static_cast<double>(count_l2);
    return scores;
}

LevelChoice select_level(double avg_l1, double avg_l2, double floor) {
    if (floor < 0.0 || floor > 1.0) {
        throw Error(ErrorCode::InvalidArgument, "floor must lie in [0, 1]");
    }
    if (std::max(avg_l1, avg_l2) < floor) {
        return {SearchLevel::L3, DecisionReason::low_confidence_floor};
    }
    // Exact tie goes to L1: fewer tools presented.
    if (avg_l1 >= avg_l2) {
        return {SearchLevel::L1, DecisionReason::score_arbitration};
    }
    return {SearchLevel::L2, DecisionReason::score_arbitration};
}

std::vector<std::string> assemble_toolset(SearchLevel level,
                                          const std::vector<std::vector<KnnHit>>& hits_l1,
                                          const std::vector<std::vector<KnnHit>>& hits_l2,
                                          const Level2Index& l2,
                                          const std::vector<ToolSpec>& tools) {
    std::vector<std::string> selected;
    std::unordered_set<std::string> seen;
    auto add = [&](const std::string& id) {
        if (seen.insert(id).second) selected.push_back(id);
    };

    auto by_score = [](const KnnHit& a, const KnnHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.target_id < b.target_id;
    };

    switch (level) {
        case SearchLevel::L1: {
            std::vector<KnnHit> pooled;
            for (const auto& hits : hits_l1) {
                pooled.insert(pooled.end(), hits.begin(), hits.end());
            }
            std::sort(pooled.begin(), pooled.end(), by_score);
            for (const auto& hit : pooled) add(hit.target_id);
            break;
        }
        case SearchLevel::L2: {
            std::vector<KnnHit> top_clusters;
            for (const auto& hits : hits_l2) {
                if (!hits.empty()) top_clusters.push_back(hits.front());
            }
            std::sort(top_clusters.begin(), top_clusters.end(), by_score);
            std::unordered_set<std::string> used_clusters;
            for (const auto& hit : top_clusters) {
                if (!used_clusters.insert(hit.target_id).second) continue;
                for (const auto& cluster : l2.clusters) {
                    if (cluster.id != hit.target_id) continue;
                    for (const auto& tool_id : cluster.tool_ids) add(tool_id);
                    break;
                }
            }
            break;
        }
        case SearchLevel::L3: {
            for (const auto& tool : tools) add(tool.id);
            break;
        }
    }
    return selected;
}

namespace {

double unix_now_s() {
    return std::chrono::duration<double>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double lap() {
        auto now = std::chrono::steady_clock::now();
        double elapsed = std::chrono::duration<double>(now - start_).count();
        start_ = now;
        return elapsed;
    }

private:
    std::chrono::steady_clock::time_point start_;
};

bool is_fatal_transport(ErrorCode code) {
    return code == ErrorCode::Unreachable || code == ErrorCode::Timeout ||
           code == ErrorCode::HttpError;
}

constexpr const char* kFunctionCallSystemPrompt =
    "You are a function-calling assistant. Complete the user's task by calling "
    "the provided functions with correct arguments. If you cannot complete the "
    "function-calling step after retrying, respond with exactly "
    "{\"error\": \"<short reason>\"} and nothing else.";

ChatRequest make_call_request(const std::string& query, const std::vector<std::string>& ids,
                              const std::vector<ToolSpec>& tools, const RunConfig& config,
                              int context_window) {
    ChatRequest request;
    request.model = config.model;
    request.context_window = context_window;
    request.messages = {{Role::system, kFunctionCallSystemPrompt}, {Role::user, query}};
    request.tools.reserve(ids.size());
    for (const auto& id : ids) {
        const ToolSpec* tool = find_tool(tools, id);
        if (tool != nullptr) request.tools.push_back(*tool);
    }
    return request;
}

std::vector<std::string> all_tool_ids(const std::vector<ToolSpec>& tools) {
    std::vector<std::string> ids;
    ids.reserve(tools.size());
    for (const auto& tool : tools) ids.push_back(tool.id);
    return ids;
}

}  // namespace

QueryRunResult run_query(const std::string& query, const Level1Index& l1,
                         const Level2Index& l2, const std::vector<ToolSpec>& tools,
                         LlmClient& llm, const Embedder& embedder, const RunConfig& config) {
    if (l1.embedder_fingerprint != embedder.fingerprint() ||
        l2.embedder_fingerprint != embedder.fingerprint()) {
        throw Error(ErrorCode::FingerprintMismatch,
                    "indexes were built with embedder '" + l1.embedder_fingerprint +
                        "'/'" + l2.embedder_fingerprint + "', active embedder is '" +
                        embedder.fingerprint() + "'");
    }
    if (tools.empty()) {
        throw Error(ErrorCode::EmptyInput, "no tools configured");
    }

    QueryRunResult result;
    result.start_unix_s = unix_now_s();
    Stopwatch total;
    Stopwatch stage;

    ControllerDecision decision;
    decision.k = config.k;

    if (config.mode == RunMode::all_tools) {
        decision.level = SearchLevel::L3;
        decision.reason = DecisionReason::all_tools_mode;
        decision.selected_tool_ids = all_tool_ids(tools);
    } else {
        try {
            RecommendOptions rec_options;
            rec_options.model = config.model;
            rec_options.template_text = config.recommender_template;
            rec_options.context_window = config.reduced_context_window;
            RecommenderOutput recommendation = recommend(query, llm, rec_options);
            result.prompt_tokens += recommendation.prompt_tokens;
            result.tokens_estimated |= recommendation.tokens_estimated;
            result.timings.recommend_s = stage.lap();

            std::vector<Embedding> rec_vecs = embed_recommendation(recommendation, embedder);
            result.timings.embed_s = stage.lap();

            LevelScores scores = score_levels(rec_vecs, l1, l2, config.k);
            LevelChoice choice = select_level(scores.avg_l1, scores.avg_l2, config.floor);
            decision.level = choice.level;
            decision.reason = choice.reason;
            decision.avg_score_l1 = scores.avg_l1;
            decision.avg_score_l2 = scores.avg_l2;
            decision.selected_tool_ids =
                assemble_toolset(choice.level, scores.hits_l1, scores.hits_l2, l2, tools);
            result.timings.search_s = stage.lap();
        } catch (const Error& error) {
            if (is_fatal_transport(error.code())) throw;
            decision.level = SearchLevel::L3;
            decision.reason = DecisionReason::recommender_failed;
            decision.selected_tool_ids = all_tool_ids(tools);
            result.timings.recommend_s = stage.lap();
        }
    }

    int window = decision.level == SearchLevel::L3 ? config.full_context_window
                                                   : config.reduced_context_window;
    ChatRequest request =
        make_call_request(query, decision.selected_tool_ids, tools, config, window);

    ChatResponse response;
    if (decision.level != SearchLevel::L3) {
        bool need_fallback = false;
        try {
            response = llm.chat(request);
            result.prompt_tokens += response.prompt_tokens;
            result.tokens_estimated |= response.tokens_estimated;
            need_fallback = response.kind == ResponseKind::error_sentinel;
        } catch (const Error& error) {
            if (error.code() != ErrorCode::ProtocolError) throw;
            need_fallback = true;  // malformed tool JSON counts as a failed call
        }
        if (need_fallback) {
            // One retry with everything on the table and the full window.
            decision.level = SearchLevel::L3;
            decision.reason = DecisionReason::execution_fallback;
            decision.selected_tool_ids = all_tool_ids(tools);
            request = make_call_request(query, decision.selected_tool_ids, tools, config,
                                        config.full_context_window);
        }
    }
    if (decision.level == SearchLevel::L3) {
        // Initial Level 3 or post-fallback; failures here are fatal.
        response = llm.chat(request);
        result.prompt_tokens += response.prompt_tokens;
        result.tokens_estimated |= response.tokens_estimated;
    }
    result.timings.call_s = stage.lap();
    result.timings.total_s = total.lap();
    result.end_unix_s = unix_now_s();
    result.decision = std::move(decision);
    result.response = std::move(response);
    return result;
}

}  // namespace toolgate
