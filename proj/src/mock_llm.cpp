#include "toolgate/mock_llm.hpp"

namespace toolgate {

void MockLlmClient::push_response(ChatResponse response) {
    std::lock_guard<std::mutex> lock(mutex_);
    script_.push_back({std::nullopt, [response](const ChatRequest&) { return response; }});
}

void MockLlmClient::push_response(std::string content_matcher, ChatResponse response) {
    std::lock_guard<std::mutex> lock(mutex_);
    script_.push_back({std::move(content_matcher),
                       [response](const ChatRequest&) { return response; }});
}

void MockLlmClient::push_handler(Handler handler) {
    std::lock_guard<std::mutex> lock(mutex_);
    script_.push_back({std::nullopt, std::move(handler)});
}

void MockLlmClient::push_error(ErrorCode code, std::string message) {
    std::lock_guard<std::mutex> lock(mutex_);
    script_.push_back({std::nullopt, [code, message](const ChatRequest&) -> ChatResponse {
                           throw Error(code, message);
                       }});
}

void MockLlmClient::set_default_handler(Handler handler) {
    std::lock_guard<std::mutex> lock(mutex_);
    default_handler_ = std::move(handler);
}

ChatResponse MockLlmClient::chat(const ChatRequest& request) {
    Handler handler;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        log_.push_back(request);
        if (!script_.empty()) {
            Step step = std::move(script_.front());
            script_.pop_front();
            if (step.matcher) {
                bool matched = false;
                for (const auto& message : request.messages) {
                    if (message.content.find(*step.matcher) != std::string::npos) {
                        matched = true;
                        break;
                    }
                }
                if (!matched) {
                    throw Error(ErrorCode::ScriptExhausted,
                                "scripted matcher '" + *step.matcher +
                                    "' not found in request content");
                }
            }
            handler = std::move(step.handler);
        } else if (default_handler_) {
            handler = default_handler_;
        } else {
            throw Error(ErrorCode::ScriptExhausted,
                        "mock script exhausted after " + std::to_string(log_.size() - 1) +
                            " calls");
        }
    }
    return finalize(request, handler(request));
}

ChatResponse MockLlmClient::finalize(const ChatRequest& request, ChatResponse response) const {
    // Mirror the HTTP client's token accounting so prompt-size comparisons
    // work against scripted runs.
    if (response.prompt_tokens == 0) {
        nlohmann::json body = serialize_chat_request(request, Dialect::openai);
        nlohmann::json prompt_side = body["messages"];
        if (body.contains("tools")) prompt_side.push_back(body["tools"]);
        response.prompt_tokens = estimate_tokens(prompt_side.dump());
        response.tokens_estimated = true;
    }
    if (response.completion_tokens == 0) {
        response.completion_tokens = estimate_tokens(response.text);
        response.tokens_estimated = true;
    }
    return response;
}

ChatResponse MockLlmClient::text_response(std::string content) {
    ChatResponse response;
    response.kind = ResponseKind::text;
    response.text = std::move(content);
    return response;
}

ChatResponse MockLlmClient::tool_call_response(std::string name, nlohmann::json arguments) {
    ChatResponse response;
    response.kind = ResponseKind::tool_calls;
    response.tool_calls.push_back({std::move(name), std::move(arguments)});
    return response;
}

ChatResponse MockLlmClient::tool_calls_response(std::vector<PredictedCall> calls) {
    ChatResponse response;
    response.kind = ResponseKind::tool_calls;
    response.tool_calls = std::move(calls);
    return response;
}

ChatResponse MockLlmClient::error_sentinel_response(std::string message) {
    ChatResponse response;
    response.kind = ResponseKind::error_sentinel;
    response.text = nlohmann::json{{"error", std::move(message)}}.dump();
    return response;
}

}  // namespace toolgate
