#pragma once

#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "toolgate/llm_client.hpp"

namespace toolgate {

/// Fully scripted in-process LLM. Canned steps are consumed in order; a step
/// with a matcher additionally requires the request content to contain the
/// matcher string. Script exhaustion throws ScriptExhausted — never silent
/// reuse. Every request is logged for instrumentation (e.g. asserting that
/// recommender calls attach no tool schemas).
class MockLlmClient : public LlmClient {
public:
    using Handler = std::function<ChatResponse(const ChatRequest&)>;

    void push_response(ChatResponse response);
    void push_response(std::string content_matcher, ChatResponse response);
    void push_handler(Handler handler);
    /// Step that throws instead of answering (timeouts, protocol errors).
    void push_error(ErrorCode code, std::string message);
    /// Fallback when the scripted queue is empty; without it, exhaustion throws.
    void set_default_handler(Handler handler);

    ChatResponse chat(const ChatRequest& request) override;

    const std::vector<ChatRequest>& log() const { return log_; }
    std::size_t calls() const { return log_.size(); }
    bool script_consumed() const { return script_.empty(); }

    // Canned-response builders.
    static ChatResponse text_response(std::string content);
    static ChatResponse tool_call_response(std::string name, nlohmann::json arguments);
    static ChatResponse tool_calls_response(std::vector<PredictedCall> calls);
    static ChatResponse error_sentinel_response(std::string message);

private:
    struct Step {
        std::optional<std::string> matcher;
        Handler handler;
    };

    ChatResponse finalize(const ChatRequest& request, ChatResponse response) const;

    std::deque<Step> script_;
    Handler default_handler_;
    std::vector<ChatRequest> log_;
    mutable std::mutex mutex_;
};

}  // namespace toolgate
