#include "toolgate/recommender.hpp"

#include "recommender_prompt_default.hpp"
#include "toolgate/json_extract.hpp"

namespace toolgate {

std::string default_recommender_template() {
    return detail::kDefaultRecommenderPrompt;
}

std::string build_recommender_prompt(const std::string& query) {
    return build_recommender_prompt(query, default_recommender_template());
}

std::string build_recommender_prompt(const std::string& query,
                                     const std::string& template_text) {
    if (query.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw Error(ErrorCode::EmptyQuery, "cannot build a recommender prompt for an empty query");
    }
    const std::string placeholder = "{{QUERY}}";
    std::string prompt = template_text;
    auto pos = prompt.find(placeholder);
    if (pos == std::string::npos) {
        throw Error(ErrorCode::InvalidArgument,
                    "recommender template lacks the {{QUERY}} placeholder");
    }
    while (pos != std::string::npos) {
        prompt.replace(pos, placeholder.size(), query);
        pos = prompt.find(placeholder, pos + query.size());
    }
    return prompt;
}

namespace {

std::string truncate(std::string text, std::size_t limit) {
    if (text.size() > limit) text.resize(limit);
    return text;
}

}  // namespace

std::vector<IdealTool> parse_recommendation(const std::string& raw) {
    auto object = extract_first_json_object(raw);
    if (!object) {
        throw Error(ErrorCode::NoJsonFound, "no JSON object in model output");
    }
    if (!object->contains("tools") || !(*object)["tools"].is_array() ||
        (*object)["tools"].empty()) {
        throw Error(ErrorCode::EmptyToolList, "model output has no tools array");
    }

    std::vector<IdealTool> tools;
    for (const auto& entry : (*object)["tools"]) {
        if (tools.size() >= kMaxIdealTools) break;
        if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string() ||
            !entry.contains("description") || !entry["description"].is_string()) {
            continue;
        }
        IdealTool tool;
        tool.name = truncate(entry["name"].get<std::string>(), kMaxIdealNameLen);
        tool.description =
            truncate(entry["description"].get<std::string>(), kMaxIdealDescriptionLen);
        if (tool.name.empty() || tool.description.empty()) continue;
        tools.push_back(std::move(tool));
    }
    if (tools.empty()) {
        throw Error(ErrorCode::MalformedEntry, "every tool entry was malformed");
    }
    return tools;
}

RecommenderOutput recommend(const std::string& query, LlmClient& llm,
                            const RecommendOptions& options) {
    std::string prompt = options.template_text.empty()
                             ? build_recommender_prompt(query)
                             : build_recommender_prompt(query, options.template_text);

    ChatRequest request;
    request.model = options.model;
    request.context_window = options.context_window;
    request.messages = {{Role::user, prompt}};
    // request.tools stays empty: the recommender never sees tool schemas.

    ChatResponse response = llm.chat(request);
    RecommenderOutput output;
    output.query_text = query;
    output.prompt_tokens = response.prompt_tokens;
    output.tokens_estimated = response.tokens_estimated;
    try {
        output.ideal_tools = parse_recommendation(response.text);
        output.raw_response = response.text;
        return output;
    } catch (const Error&) {
        // fall through to the single retry
    }

    request.messages.push_back({Role::assistant, response.text});
    request.messages.push_back(
        {Role::user,
         "Output only the JSON object of the form {\"tools\": [{\"name\": ..., "
         "\"description\": ...}]}. No other text."});
    response = llm.chat(request);
    output.prompt_tokens += response.prompt_tokens;
    output.tokens_estimated |= response.tokens_estimated;
    try {
        output.ideal_tools = parse_recommendation(response.text);
        output.raw_response = response.text;
        return output;
    } catch (const Error& error) {
        throw Error(ErrorCode::RecommenderFailed,
                    std::string("unusable recommendation after retry (") + error.what() + ")");
    }
}

std::vector<Embedding> embed_recommendation(const RecommenderOutput& output,
                                            const Embedder& embedder) {
    if (output.ideal_tools.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no ideal tools to embed");
    }
    std::vector<Embedding> embeddings;
    embeddings.reserve(output.ideal_tools.size());
    for (const auto& tool : output.ideal_tools) {
        embeddings.push_back(embedder.embed(output.query_text + " || " + tool.name + ": " +
                                            tool.description));
    }
    return embeddings;
}

}  // namespace toolgate
