#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "toolgate/errors.hpp"
#include "toolgate/tool_spec.hpp"

namespace toolgate {

enum class Role { system, user, assistant, tool };

const char* role_name(Role role);

struct ChatMessage {
    Role role = Role::user;
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    std::vector<ToolSpec> tools;  // empty = no tool schemas attached
    int context_window = 16384;
    double temperature = 0.0;
};

enum class ResponseKind { text, tool_calls, error_sentinel };

struct PredictedCall {
    std::string name;
    nlohmann::json arguments = nlohmann::json::object();

    bool operator==(const PredictedCall& other) const = default;
};

struct ChatResponse {
    ResponseKind kind = ResponseKind::text;
    std::string text;  // content for text / error_sentinel kinds
    std::vector<PredictedCall> tool_calls;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    bool tokens_estimated = false;
    double latency_s = 0.0;
};

/// ceil(utf8 bytes / 4); the fallback when a server reports no usage.
long estimate_tokens(const std::string& text);

enum class Dialect { openai, ollama };

struct LlmConfig {
    std::string endpoint;  // TOOLGATE_LLM_ENDPOINT overrides
    Dialect dialect = Dialect::openai;
    std::string model;
    double timeout_s = 120.0;
};

Dialect dialect_from_name(const std::string& name);

/// One [section] of a small INI file: `key = value` lines, optional quotes,
/// '#'/';' comments. Returns the keys seen in that section.
std::map<std::string, std::string> read_config_section(const std::string& path,
                                                       const std::string& section);

/// Overlays the [llm] keys (endpoint, dialect, model, timeout_s) onto base.
LlmConfig apply_llm_section(const std::map<std::string, std::string>& section,
                            LlmConfig base);

/// Chat-completions request body. Ollama dialect carries the context window
/// as options.num_ctx; OpenAI-style servers manage it model-side.
nlohmann::json serialize_chat_request(const ChatRequest& request, Dialect dialect);

/// Parses either dialect's response body into a ChatResponse (kind, calls,
/// usage). Detects the {"error": ...} content sentinel. Throws ProtocolError
/// on malformed bodies or unparsable tool-call arguments.
ChatResponse parse_chat_response(const nlohmann::json& body, Dialect dialect);

class LlmClient {
public:
    virtual ~LlmClient() = default;

    /// Throws Unreachable, Timeout, HttpError(status), ProtocolError.
    virtual ChatResponse chat(const ChatRequest& request) = 0;
};

class HttpLlmClient : public LlmClient {
public:
    explicit HttpLlmClient(LlmConfig config);
    ChatResponse chat(const ChatRequest& request) override;

    const LlmConfig& config() const { return config_; }

private:
    LlmConfig config_;
    std::string scheme_host_port_;
    std::string path_;
};

}  // namespace toolgate
