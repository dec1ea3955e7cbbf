// Wire-level tests against in-process HTTP servers.

#include <chrono>
#include <cstdlib>
#include <thread>

#include "doctest.h"
#include "support/scoped_server.hpp"
#include "toolgate/embedding.hpp"
#include "toolgate/llm_client.hpp"

using namespace toolgate;
using testsupport::ScopedServer;

TEST_CASE("remote embedder round-trips the wire format") {
    nlohmann::json seen_body;
    ScopedServer server([&](httplib::Server& s) {
        s.Post("/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
            seen_body = nlohmann::json::parse(req.body);
            std::size_t dim = 8;
            nlohmann::json vec = nlohmann::json::array();
            for (std::size_t i = 0; i < dim; ++i) vec.push_back(i == 0 ? 2.0 : 0.0);
            res.set_content(nlohmann::json{{"embeddings", {vec}}}.dump(), "application/json");
        });
    });

    EmbedderConfig config;
    config.kind = EmbedderKind::remote_http;
    config.endpoint = server.url();
    config.model_name = "test-model";
    config.dim = 8;
    auto embedder = make_embedder(config);
    auto embedding = embedder->embed("hello world");

    CHECK(seen_body["model"] == "test-model");
    CHECK(seen_body["input"][0] == "hello world");
    CHECK(embedding.dim() == 8);
    CHECK(embedding.values[0] == doctest::Approx(1.0));  // normalized server vector
}

TEST_CASE("remote embedder failure modes") {
    ScopedServer server([&](httplib::Server& s) {
        s.Post("/wrongdim", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"embeddings":[[1.0,0.0]]})", "application/json");
        });
        s.Post("/boom", [](const httplib::Request&, httplib::Response& res) {
            res.status = 500;
            res.set_content("no", "text/plain");
        });
    });

    EmbedderConfig config;
    config.kind = EmbedderKind::remote_http;
    config.dim = 8;

    config.endpoint = server.url("/wrongdim");
    try {
        make_embedder(config)->embed("x");
        FAIL("expected DimensionMismatch");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::DimensionMismatch);
    }

    config.endpoint = server.url("/boom");
    try {
        make_embedder(config)->embed("x");
        FAIL("expected RemoteUnavailable");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::RemoteUnavailable);
    }

    config.endpoint = "http://127.0.0.1:1/unused";  // nothing listens there
    config.timeout_s = 1.0;
    try {
        make_embedder(config)->embed("x");
        FAIL("expected RemoteUnavailable");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::RemoteUnavailable);
    }
}

TEST_CASE("embed endpoint env var wins over config") {
    ScopedServer server([&](httplib::Server& s) {
        s.Post("/embeddings", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"embeddings":[[0.0,3.0]]})", "application/json");
        });
    });
    ::setenv("TOOLGATE_EMBED_ENDPOINT", server.url().c_str(), 1);
    EmbedderConfig config;
    config.kind = EmbedderKind::remote_http;
    config.endpoint = "http://127.0.0.1:1/ignored";
    config.dim = 2;
    auto embedding = make_embedder(config)->embed("x");
    ::unsetenv("TOOLGATE_EMBED_ENDPOINT");
    CHECK(embedding.values[1] == doctest::Approx(1.0));
}

TEST_CASE("http llm client speaks the openai dialect") {
    nlohmann::json seen_body;
    ScopedServer server([&](httplib::Server& s) {
        s.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
            seen_body = nlohmann::json::parse(req.body);
            nlohmann::json body = {
                {"choices",
                 {{{"message",
                    {{"role", "assistant"},
                     {"tool_calls",
                      {{{"function",
                         {{"name", "get_weather"},
                          {"arguments", R"({"city":"NY"})"}}}}}}}}}}},
                {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 5}}},
            };
            res.set_content(body.dump(), "application/json");
        });
    });

    LlmConfig config;
    config.endpoint = server.url();
    config.dialect = Dialect::openai;
    config.model = "test-model";
    HttpLlmClient client(config);

    ChatRequest request;
    request.messages = {{Role::user, "weather in NY?"}};
    ToolSpec tool{"get_weather", "get_weather", "fetches weather", nlohmann::json::object()};
    request.tools = {tool};
    auto response = client.chat(request);

    CHECK(seen_body["model"] == "test-model");
    CHECK(seen_body["tools"][0]["function"]["name"] == "get_weather");
    CHECK(response.kind == ResponseKind::tool_calls);
    CHECK(response.tool_calls[0].name == "get_weather");
    CHECK(response.prompt_tokens == 11);
    CHECK(response.latency_s > 0.0);
}

TEST_CASE("http llm client sends num_ctx in the ollama dialect") {
    nlohmann::json seen_body;
    ScopedServer server([&](httplib::Server& s) {
        s.Post("/api/chat", [&](const httplib::Request& req, httplib::Response& res) {
            seen_body = nlohmann::json::parse(req.body);
            res.set_content(
                nlohmann::json{{"message", {{"role", "assistant"}, {"content", "hi"}}}}.dump(),
                "application/json");
        });
    });

    LlmConfig config;
    config.endpoint = server.url();
    config.dialect = Dialect::ollama;
    config.model = "local";
    HttpLlmClient client(config);

    ChatRequest request;
    request.messages = {{Role::user, "hello"}};
    request.context_window = 8192;
    auto response = client.chat(request);
    CHECK(seen_body["options"]["num_ctx"] == 8192);
    CHECK(response.kind == ResponseKind::text);
    CHECK(response.tokens_estimated);  // no usage fields from this server
    CHECK(response.prompt_tokens > 0);
}

TEST_CASE("llm endpoint env var wins over config") {
    ScopedServer server([&](httplib::Server& s) {
        s.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(
                nlohmann::json{{"choices",
                                {{{"message", {{"role", "assistant"}, {"content", "env"}}}}}}}
                    .dump(),
                "application/json");
        });
    });
    ::setenv("TOOLGATE_LLM_ENDPOINT", server.url().c_str(), 1);
    LlmConfig config;
    config.endpoint = "http://127.0.0.1:1";  // would be unreachable
    config.dialect = Dialect::openai;
    HttpLlmClient client(config);
    ::unsetenv("TOOLGATE_LLM_ENDPOINT");

    ChatRequest request;
    request.messages = {{Role::user, "x"}};
    CHECK(client.chat(request).text == "env");
}

TEST_CASE("http llm client failure modes") {
    ScopedServer server([&](httplib::Server& s) {
        s.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
            res.status = 503;
            res.set_content("overloaded", "text/plain");
        });
        s.Post("/garbage/v1/chat/completions",
               [](const httplib::Request&, httplib::Response& res) {
                   res.set_content("not json at all", "application/json");
               });
        s.Post("/slow/v1/chat/completions",
               [](const httplib::Request&, httplib::Response& res) {
                   std::this_thread::sleep_for(std::chrono::milliseconds(1500));
                   res.set_content("{}", "application/json");
               });
    });

    ChatRequest request;
    request.messages = {{Role::user, "x"}};

    LlmConfig config;
    config.dialect = Dialect::openai;

    config.endpoint = server.url();
    try {
        HttpLlmClient(config).chat(request);
        FAIL("expected HttpError");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::HttpError);
    }

    config.endpoint = server.url("/garbage/v1/chat/completions");
    try {
        HttpLlmClient(config).chat(request);
        FAIL("expected ProtocolError");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::ProtocolError);
    }

    config.endpoint = server.url("/slow/v1/chat/completions");
    config.timeout_s = 0.2;
    try {
        HttpLlmClient(config).chat(request);
        FAIL("expected Timeout");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::Timeout);
    }

    config.endpoint = "http://127.0.0.1:1";
    config.timeout_s = 1.0;
    try {
        HttpLlmClient(config).chat(request);
        FAIL("expected Unreachable");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::Unreachable);
    }
}
