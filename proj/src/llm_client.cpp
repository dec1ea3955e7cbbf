#include "toolgate/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>

#include "httplib.h"
#include "toolgate/http_url.hpp"

namespace toolgate {

const char* role_name(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
        case Role::tool: return "tool";
    }
    return "user";
}

long estimate_tokens(const std::string& text) {
    return static_cast<long>((text.size() + 3) / 4);
}

nlohmann::json serialize_chat_request(const ChatRequest& request, Dialect dialect) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& message : request.messages) {
        messages.push_back({{"role", role_name(message.role)},
                            {"content", message.content}});
    }
    nlohmann::json body = {
        {"model", request.model},
        {"messages", messages},
    };
    if (!request.tools.empty()) {
        nlohmann::json tools = nlohmann::json::array();
        for (const auto& tool : request.tools) tools.push_back(tool_to_function_json(tool));
        body["tools"] = tools;
    }
    if (dialect == Dialect::ollama) {
        body["options"] = {{"num_ctx", request.context_window},
                           {"temperature", request.temperature}};
        body["stream"] = false;
    } else {
        body["temperature"] = request.temperature;
    }
    return body;
}

namespace {

PredictedCall parse_tool_call(const nlohmann::json& entry) {
    if (!entry.is_object() || !entry.contains("function") ||
        !entry["function"].is_object()) {
        throw Error(ErrorCode::ProtocolError, "malformed tool_calls entry");
    }
    const auto& function = entry["function"];
    if (!function.contains("name") || !function["name"].is_string()) {
        throw Error(ErrorCode::ProtocolError, "tool call missing function name");
    }
    PredictedCall call;
    call.name = function["name"].get<std::string>();
    if (function.contains("arguments")) {
        const auto& args = function["arguments"];
        if (args.is_object()) {
            call.arguments = args;  // Ollama inlines the object
        } else if (args.is_string()) {
            auto parsed = nlohmann::json::parse(args.get<std::string>(), nullptr, false);
            if (parsed.is_discarded() || !parsed.is_object()) {
                throw Error(ErrorCode::ProtocolError,
                            "unparsable tool-call arguments for " + call.name);
            }
            call.arguments = parsed;
        } else {
            throw Error(ErrorCode::ProtocolError,
                        "tool-call arguments are neither object nor string");
        }
    }
    return call;
}

bool is_error_sentinel(const std::string& content) {
    auto parsed = nlohmann::json::parse(content, nullptr, false);
    return !parsed.is_discarded() && parsed.is_object() && parsed.contains("error");
}

}  // namespace

ChatResponse parse_chat_response(const nlohmann::json& body, Dialect dialect) {
    if (!body.is_object()) {
        throw Error(ErrorCode::ProtocolError, "response body is not a JSON object");
    }

    nlohmann::json message;
    ChatResponse response;
    if (dialect == Dialect::openai) {
        if (!body.contains("choices") || !body["choices"].is_array() ||
            body["choices"].empty() || !body["choices"][0].is_object() ||
            !body["choices"][0].contains("message")) {
            throw Error(ErrorCode::ProtocolError, "no choices[0].message in response");
        }
        message = body["choices"][0]["message"];
        if (body.contains("usage") && body["usage"].is_object()) {
            response.prompt_tokens = body["usage"].value("prompt_tokens", 0L);
            response.completion_tokens = body["usage"].value("completion_tokens", 0L);
        } else {
            response.tokens_estimated = true;
        }
    } else {
        if (!body.contains("message") || !body["message"].is_object()) {
            throw Error(ErrorCode::ProtocolError, "no message in response");
        }
        message = body["message"];
        if (body.contains("prompt_eval_count")) {
            response.prompt_tokens = body.value("prompt_eval_count", 0L);
            response.completion_tokens = body.value("eval_count", 0L);
        } else {
            response.tokens_estimated = true;
        }
    }

    if (message.contains("tool_calls") && message["tool_calls"].is_array() &&
        !message["tool_calls"].empty()) {
        for (const auto& entry : message["tool_calls"]) {
            response.tool_calls.push_back(parse_tool_call(entry));
        }
        response.kind = ResponseKind::tool_calls;
        return response;
    }

    response.text = message.value("content", std::string{});
    response.kind =
        is_error_sentinel(response.text) ? ResponseKind::error_sentinel : ResponseKind::text;
    return response;
}

Dialect dialect_from_name(const std::string& name) {
    if (name == "openai") return Dialect::openai;
    if (name == "ollama") return Dialect::ollama;
    throw Error(ErrorCode::InvalidArgument, "dialect must be 'openai' or 'ollama', got '" +
                                                name + "'");
}

namespace {

std::string strip(const std::string& text) {
    auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

std::string unquote(std::string value) {
    if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                              (value.front() == '\'' && value.back() == '\''))) {
        return value.substr(1, value.size() - 2);
    }
    return value;
}

}  // namespace

std::map<std::string, std::string> read_config_section(const std::string& path,
                                                       const std::string& section) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open config file " + path);
    }
    std::map<std::string, std::string> keys;
    std::string line, current;
    while (std::getline(in, line)) {
        std::string trimmed = strip(line);
        if (trimmed.empty() || trimmed[0] == '#' || trimmed[0] == ';') continue;
        if (trimmed.front() == '[' && trimmed.back() == ']') {
            current = strip(trimmed.substr(1, trimmed.size() - 2));
            continue;
        }
        if (current != section) continue;
        auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::SchemaError, "config line without '=': " + trimmed);
        }
        keys[strip(trimmed.substr(0, eq))] = unquote(strip(trimmed.substr(eq + 1)));
    }
    return keys;
}

LlmConfig apply_llm_section(const std::map<std::string, std::string>& section,
                            LlmConfig base) {
    if (auto it = section.find("endpoint"); it != section.end()) base.endpoint = it->second;
    if (auto it = section.find("dialect"); it != section.end()) {
        base.dialect = dialect_from_name(it->second);
    }
    if (auto it = section.find("model"); it != section.end()) base.model = it->second;
    if (auto it = section.find("timeout_s"); it != section.end()) {
        try {
            base.timeout_s = std::stod(it->second);
        } catch (const std::exception&) {
            throw Error(ErrorCode::SchemaError, "bad timeout_s value '" + it->second + "'");
        }
    }
    return base;
}

HttpLlmClient::HttpLlmClient(LlmConfig config) : config_(std::move(config)) {
    std::string endpoint = config_.endpoint;
    if (const char* env = std::getenv("TOOLGATE_LLM_ENDPOINT")) {
        endpoint = env;
    }
    const char* default_path =
        config_.dialect == Dialect::openai ? "/v1/chat/completions" : "/api/chat";
    HttpUrl url = parse_http_url(endpoint, default_path);
    scheme_host_port_ = url.scheme_host_port();
    path_ = url.path;
}

ChatResponse HttpLlmClient::chat(const ChatRequest& request) {
    ChatRequest effective = request;
    if (effective.model.empty()) effective.model = config_.model;
    nlohmann::json body = serialize_chat_request(effective, config_.dialect);

    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
    client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
    client.set_write_timeout(std::chrono::duration<double>(config_.timeout_s));

    auto start = std::chrono::steady_clock::now();
    auto res = client.Post(path_, body.dump(), "application/json");
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

    if (!res) {
        auto err = res.error();
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
            err == httplib::Error::Write) {
            throw Error(ErrorCode::Timeout,
                        "LLM endpoint timed out: " + httplib::to_string(err));
        }
        throw Error(ErrorCode::Unreachable,
                    "LLM endpoint unreachable: " + httplib::to_string(err));
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error(ErrorCode::HttpError, "LLM endpoint returned HTTP " +
                                              std::to_string(res->status) + ": " + res->body);
    }

    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
        throw Error(ErrorCode::ProtocolError, "unparsable LLM response body");
    }
    ChatResponse response = parse_chat_response(parsed, config_.dialect);
    response.latency_s = elapsed.count();
    if (response.tokens_estimated) {
        nlohmann::json prompt_side = body["messages"];
        if (body.contains("tools")) prompt_side.push_back(body["tools"]);
        response.prompt_tokens = estimate_tokens(prompt_side.dump());
        nlohmann::json completion_side = response.text;
        if (!response.tool_calls.empty()) {
            completion_side = nlohmann::json::array();
            for (const auto& call : response.tool_calls) {
                completion_side.push_back({{"name", call.name}, {"arguments", call.arguments}});
            }
        }
        response.completion_tokens = estimate_tokens(completion_side.dump());
    }
    return response;
}

}  // namespace toolgate
