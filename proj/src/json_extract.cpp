#include "toolgate/json_extract.hpp"

namespace toolgate {

namespace {

// Span of a balanced {...} starting at `start`, or npos when unbalanced.
std::size_t balanced_object_end(const std::string& text, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            --depth;
            if (depth == 0) return i;
        }
    }
    return std::string::npos;
}

}  // namespace

std::optional<nlohmann::json> extract_first_json_object(const std::string& raw) {
    for (std::size_t pos = raw.find('{'); pos != std::string::npos;
         pos = raw.find('{', pos + 1)) {
        std::size_t end = balanced_object_end(raw, pos);
        if (end == std::string::npos) continue;
        auto parsed =
            nlohmann::json::parse(raw.substr(pos, end - pos + 1), nullptr, false);
        if (!parsed.is_discarded() && parsed.is_object()) {
            return parsed;
        }
    }
    return std::nullopt;
}

}  // namespace toolgate
