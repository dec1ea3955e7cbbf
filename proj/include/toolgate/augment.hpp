#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "toolgate/index.hpp"
#include "toolgate/llm_client.hpp"

namespace toolgate {

struct SeedSample {
    std::string category;
    std::vector<AugmentedQuery> queries;  // origin == seed, size <= cap
};

struct AugmentationConfig {
    int per_category_sample = 10;
    int variants_per_seed = 3;
    double rouge_min = 0.3;
    double rouge_max = 0.9;
    std::uint64_t rng_seed = 0;
    std::string model;

    void validate() const;  // 0 <= rouge_min < rouge_max <= 1
};

/// Per category, min(cap, available) queries drawn uniformly without
/// replacement; deterministic for a fixed rng_seed. Categories come back in
/// sorted order. Throws EmptyTrainingSet.
std::vector<SeedSample> sample_seeds(const std::vector<AugmentedQuery>& training_set,
                                     const AugmentationConfig& config);

/// Asks the LLM for contextually proximate rephrasings of one seed, keeps
/// variants inside the ROUGE band whose tools all resolve. Generation is
/// best-effort: after one retry an unparsable response skips the seed
/// (returns empty) rather than failing the pipeline.
std::vector<AugmentedQuery> generate_variants(const AugmentedQuery& seed, LlmClient& llm,
                                              const AugmentationConfig& config,
                                              const std::set<std::string>& known_tool_ids);

/// Seeds then kept variants, ids made unique, duplicate texts dropped
/// keeping the seed-origin copy.
std::vector<AugmentedQuery> assemble_corpus(const std::vector<SeedSample>& seeds,
                                            const std::vector<AugmentedQuery>& variants);

std::string build_variant_prompt(const AugmentedQuery& seed, int variants_per_seed,
                                 const std::set<std::string>& known_tool_ids);

}  // namespace toolgate
