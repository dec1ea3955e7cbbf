#include "toolgate/augment.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <random>
#include <unordered_set>

#include "toolgate/json_extract.hpp"
#include "toolgate/rouge.hpp"

namespace toolgate {

void AugmentationConfig::validate() const {
    if (per_category_sample <= 0 || variants_per_seed < 0) {
        throw Error(ErrorCode::InvalidArgument, "sample and variant counts must be positive");
    }
    if (!(0.0 <= rouge_min && rouge_min < rouge_max && rouge_max <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "need 0 <= rouge_min < rouge_max <= 1");
    }
}

namespace {

// Rejection-sampled bound keeps selection uniform and portable; the standard
// distributions are implementation-defined.
std::uint64_t bounded_uint64(std::mt19937_64& rng, std::uint64_t bound) {
    std::uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
    while (true) {
        std::uint64_t value = rng();
        if (value >= threshold) return value % bound;
    }
}

}  // namespace

std::vector<SeedSample> sample_seeds(const std::vector<AugmentedQuery>& training_set,
                                     const AugmentationConfig& config) {
    config.validate();
    if (training_set.empty()) {
        throw Error(ErrorCode::EmptyTrainingSet, "no training queries to sample from");
    }
    std::map<std::string, std::vector<AugmentedQuery>> by_category;
    for (const auto& query : training_set) {
        by_category[query.category].push_back(query);
    }

    std::mt19937_64 rng(config.rng_seed);
    std::vector<SeedSample> samples;
    for (auto& [category, queries] : by_category) {
        std::size_t take =
            std::min<std::size_t>(queries.size(), static_cast<std::size_t>(config.per_category_sample));
        // Partial Fisher-Yates: the first `take` slots are the sample.
        for (std::size_t i = 0; i < take; ++i) {
            std::size_t j = i + bounded_uint64(rng, queries.size() - i);
            std::swap(queries[i], queries[j]);
        }
        SeedSample sample;
        sample.category = category;
        sample.queries.assign(queries.begin(), queries.begin() + take);
        for (auto& query : sample.queries) query.origin = QueryOrigin::seed;
        samples.push_back(std::move(sample));
    }
    return samples;
}

std::string build_variant_prompt(const AugmentedQuery& seed, int variants_per_seed,
                                 const std::set<std::string>& known_tool_ids) {
    std::string tool_list;
    for (const auto& id : known_tool_ids) {
        if (!tool_list.empty()) tool_list += ", ";
        tool_list += id;
    }
    std::string prompt =
        "You write variants of task queries for clustering. Given the task below, "
        "produce " + std::to_string(variants_per_seed) +
        " variants that rephrase the task or permute it into a contextually "
        "proximate task, each listing the tool names it would need.\n\n"
        "Valid tool names: " + tool_list + "\n\n"
        "Respond with ONLY a JSON object of the form:\n"
        "{\"variants\": [{\"text\": \"<variant query>\", \"tools\": [\"<tool name>\"]}]}\n\n"
        "Task: " + seed.text;
    return prompt;
}

namespace {

std::vector<AugmentedQuery> parse_variants(const std::string& raw, const AugmentedQuery& seed,
                                           const AugmentationConfig& config,
                                           const std::set<std::string>& known_tool_ids) {
    auto object = extract_first_json_object(raw);
    if (!object || !object->contains("variants") || !(*object)["variants"].is_array()) {
        throw Error(ErrorCode::UnparsableGeneration, "no variants array in generation");
    }
    std::vector<AugmentedQuery> kept;
    int counter = 0;
    for (const auto& entry : (*object)["variants"]) {
        ++counter;
        if (!entry.is_object() || !entry.contains("text") || !entry["text"].is_string() ||
            !entry.contains("tools") || !entry["tools"].is_array()) {
            continue;
        }
        AugmentedQuery variant;
        variant.text = entry["text"].get<std::string>();
        if (variant.text.empty()) continue;

        bool tools_ok = !entry["tools"].empty();
        for (const auto& tool : entry["tools"]) {
            if (!tool.is_string() || !known_tool_ids.count(tool.get<std::string>())) {
                tools_ok = false;
                break;
            }
            variant.gold_tools.push_back(tool.get<std::string>());
        }
        if (!tools_ok) continue;

        double score;
        try {
            score = rouge_l(variant.text, seed.text);
        } catch (const Error&) {
            continue;  // punctuation-only variant text
        }
        if (score < config.rouge_min || score > config.rouge_max) continue;

        variant.id = seed.id + "-v" + std::to_string(counter);
        variant.category = seed.category;
        variant.origin = QueryOrigin::generated;
        variant.rouge_vs_seed = score;
        kept.push_back(std::move(variant));
    }
    return kept;
}

}  // namespace

std::vector<AugmentedQuery> generate_variants(const AugmentedQuery& seed, LlmClient& llm,
                                              const AugmentationConfig& config,
                                              const std::set<std::string>& known_tool_ids) {
    config.validate();
    if (seed.gold_tools.empty()) {
        throw Error(ErrorCode::InvalidArgument, "seed '" + seed.id + "' has no gold tools");
    }

    ChatRequest request;
    request.model = config.model;
    request.messages = {{Role::user,
                         build_variant_prompt(seed, config.variants_per_seed, known_tool_ids)}};
    ChatResponse response = llm.chat(request);

    try {
        return parse_variants(response.text, seed, config, known_tool_ids);
    } catch (const Error& error) {
        if (error.code() != ErrorCode::UnparsableGeneration) throw;
    }

    // One retry with a format reminder, then skip the seed: the corpus only
    // needs noisy-but-plausible queries, not full coverage.
    request.messages.push_back({Role::assistant, response.text});
    request.messages.push_back(
        {Role::user, "Output only the JSON object described above. No other text."});
    response = llm.chat(request);
    try {
        return parse_variants(response.text, seed, config, known_tool_ids);
    } catch (const Error& error) {
        if (error.code() != ErrorCode::UnparsableGeneration) throw;
        std::cerr << "warning: skipping seed '" << seed.id
                  << "': generation unparsable after retry\n";
        return {};
    }
}

std::vector<AugmentedQuery> assemble_corpus(const std::vector<SeedSample>& seeds,
                                            const std::vector<AugmentedQuery>& variants) {
    std::vector<AugmentedQuery> corpus;
    std::unordered_set<std::string> seen_texts;
    std::unordered_set<std::string> seen_ids;

    auto unique_id = [&seen_ids](std::string id) {
        std::string candidate = id;
        int suffix = 1;
        while (!seen_ids.insert(candidate).second) {
            candidate = id + "-" + std::to_string(++suffix);
        }
        return candidate;
    };

    for (const auto& sample : seeds) {
        for (const auto& query : sample.queries) {
            if (!seen_texts.insert(query.text).second) continue;
            AugmentedQuery copy = query;
            copy.id = unique_id(copy.id);
            corpus.push_back(std::move(copy));
        }
    }
    for (const auto& variant : variants) {
        if (!seen_texts.insert(variant.text).second) continue;  // seed copy wins
        AugmentedQuery copy = variant;
        copy.id = unique_id(copy.id);
        corpus.push_back(std::move(copy));
    }
    return corpus;
}

}  // namespace toolgate
