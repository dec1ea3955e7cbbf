#pragma once

#include <string>
#include <vector>

namespace toolgate {

/// Lowercase, split on whitespace, strip punctuation characters.
std::vector<std::string> rouge_tokenize(const std::string& text);

/// ROUGE-L F1 over word tokens: P = LCS/|candidate|, R = LCS/|reference|,
/// F1 = 2PR/(P+R). Symmetric; in [0, 1]. Throws EmptyText when either side
/// tokenizes to nothing.
double rouge_l(const std::string& candidate, const std::string& reference);

}  // namespace toolgate
