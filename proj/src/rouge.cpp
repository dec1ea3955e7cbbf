#include "toolgate/rouge.hpp"

#include <algorithm>
#include <cctype>

#include "toolgate/errors.hpp"

namespace toolgate {

std::vector<std::string> rouge_tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    for (char c : text) {
        unsigned char uc = static_cast<unsigned char>(c);
        if (std::isspace(uc)) {
            flush();
        } else if (std::ispunct(uc)) {
            continue;  // stripped entirely
        } else {
            current.push_back(static_cast<char>(std::tolower(uc)));
        }
    }
    flush();
    return tokens;
}

namespace {

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    // Two-row DP over token sequences.
    std::vector<std::size_t> prev(b.size() + 1, 0), curr(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                curr[j] = prev[j - 1] + 1;
            } else {
                curr[j] = std::max(prev[j], curr[j - 1]);
            }
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

}  // namespace

double rouge_l(const std::string& candidate, const std::string& reference) {
    auto cand = rouge_tokenize(candidate);
    auto ref = rouge_tokenize(reference);
    if (cand.empty() || ref.empty()) {
        throw Error(ErrorCode::EmptyText, "rouge_l over empty token sequence");
    }
    double lcs = static_cast<double>(lcs_length(cand, ref));
    if (lcs == 0.0) return 0.0;
    double precision = lcs / static_cast<double>(cand.size());
    double recall = lcs / static_cast<double>(ref.size());
    return 2.0 * precision * recall / (precision + recall);
}

}  // namespace toolgate
