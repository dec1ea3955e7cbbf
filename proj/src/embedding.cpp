#include "toolgate/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "toolgate/hashing.hpp"
#include "toolgate/http_url.hpp"

// httplib pulled in via http_url.hpp translation units only where needed
#include "httplib.h"

namespace toolgate {

double dot(const Embedding& a, const Embedding& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        sum += a.values[i] * b.values[i];
    }
    return sum;
}

double norm(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum);
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "cosine over dims " + std::to_string(a.dim()) + " vs " +
                        std::to_string(b.dim()));
    }
    double na = norm(a.values);
    double nb = norm(b.values);
    if (na < kNormFloor || nb < kNormFloor) {
        throw Error(ErrorCode::ZeroVector, "cosine of a zero vector");
    }
    double value = dot(a, b) / (na * nb);
    return std::clamp(value, -1.0, 1.0);
}

Embedding normalize(const std::vector<double>& raw) {
    for (double v : raw) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::InvalidArgument, "non-finite component");
        }
    }
    double n = norm(raw);
    if (n < kNormFloor) {
        throw Error(ErrorCode::ZeroVector,
                    "norm " + std::to_string(n) + " below floor");
    }
    Embedding out;
    out.values.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out.values[i] = raw[i] / n;
    return out;
}

void EmbedderConfig::validate() const {
    if (dim == 0) {
        throw Error(ErrorCode::InvalidArgument, "embedding dim must be positive");
    }
    bool remote = kind == EmbedderKind::remote_http;
    bool has_endpoint =
        !endpoint.empty() || std::getenv("TOOLGATE_EMBED_ENDPOINT") != nullptr;
    if (remote && !has_endpoint) {
        throw Error(ErrorCode::InvalidArgument, "remote-http embedder needs an endpoint");
    }
    if (!remote && !endpoint.empty()) {
        throw Error(ErrorCode::InvalidArgument,
                    "endpoint only makes sense for the remote-http kind");
    }
}

std::string EmbedderConfig::fingerprint() const {
    const char* kind_name =
        kind == EmbedderKind::deterministic_test ? "deterministic-test" : "remote-http";
    return std::string(kind_name) + ":" + model_name + ":" + std::to_string(dim);
}

namespace {

std::string trim(const std::string& text) {
    auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_whitespace(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream stream(text);
    std::string token;
    while (stream >> token) tokens.push_back(std::move(token));
    return tokens;
}

// Hash-projection embedder: every token maps to a seeded pseudo-random unit
// vector; the text embedding is the normalized mean of its token vectors.
// Pure function of (text, dim), integer-seeded so it is bit-identical across
// platforms and runs.
class DeterministicEmbedder : public Embedder {
public:
    explicit DeterministicEmbedder(EmbedderConfig config) : config_(std::move(config)) {}

    Embedding embed(const std::string& text) const override {
        std::string trimmed = trim(text);
        if (trimmed.empty()) {
            throw Error(ErrorCode::EmptyText, "cannot embed empty text");
        }
        auto tokens = split_whitespace(trimmed);
        std::vector<double> acc(config_.dim, 0.0);
        for (const auto& token : tokens) {
            std::uint64_t state = fnv1a64(token);
            std::vector<double> tok_vec(config_.dim);
            double tok_norm_sq = 0.0;
            for (std::size_t i = 0; i < config_.dim; ++i) {
                double v = u64_to_unit_double(splitmix64_next(state)) * 2.0 - 1.0;
                tok_vec[i] = v;
                tok_norm_sq += v * v;
            }
            double tok_norm = std::sqrt(tok_norm_sq);
            if (tok_norm < kNormFloor) continue;  // astronomically unlikely
            for (std::size_t i = 0; i < config_.dim; ++i) {
                acc[i] += tok_vec[i] / tok_norm;
            }
        }
        for (double& v : acc) v /= static_cast<double>(tokens.size());
        return normalize(acc);
    }

    std::size_t dim() const override { return config_.dim; }
    std::string fingerprint() const override { return config_.fingerprint(); }

private:
    EmbedderConfig config_;
};

// Remote embedding server speaking
//   POST <path> {"model": ..., "input": [texts]} -> {"embeddings": [[...]]}
// Requests are serialized behind a mutex; the handle is share-safe.
class RemoteEmbedder : public Embedder {
public:
    explicit RemoteEmbedder(EmbedderConfig config) : config_(std::move(config)) {
        std::string endpoint = config_.endpoint;
        if (const char* env = std::getenv("TOOLGATE_EMBED_ENDPOINT")) {
            endpoint = env;
        }
        url_ = parse_http_url(endpoint, "/embeddings");
    }

    Embedding embed(const std::string& text) const override {
        std::string trimmed = trim(text);
        if (trimmed.empty()) {
            throw Error(ErrorCode::EmptyText, "cannot embed empty text");
        }

        nlohmann::json body = {
            {"model", config_.model_name},
            {"input", nlohmann::json::array({text})},
        };

        std::lock_guard<std::mutex> lock(mutex_);
        httplib::Client client(url_.scheme_host_port());
        client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
        client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));

        auto res = client.Post(url_.path, body.dump(), "application/json");
        if (!res) {
            throw Error(ErrorCode::RemoteUnavailable,
                        "embedding endpoint unreachable: " + httplib::to_string(res.error()));
        }
        if (res->status < 200 || res->status >= 300) {
            throw Error(ErrorCode::RemoteUnavailable,
                        "embedding endpoint returned HTTP " + std::to_string(res->status));
        }

        auto parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("embeddings") ||
            !parsed["embeddings"].is_array() || parsed["embeddings"].empty() ||
            !parsed["embeddings"][0].is_array()) {
            throw Error(ErrorCode::RemoteUnavailable, "malformed embedding response body");
        }

        const auto& vec = parsed["embeddings"][0];
        if (vec.size() != config_.dim) {
            throw Error(ErrorCode::DimensionMismatch,
                        "server returned dim " + std::to_string(vec.size()) +
                            ", expected " + std::to_string(config_.dim));
        }
        std::vector<double> raw;
        raw.reserve(vec.size());
        for (const auto& v : vec) {
            if (!v.is_number()) {
                throw Error(ErrorCode::RemoteUnavailable, "non-numeric embedding component");
            }
            raw.push_back(v.get<double>());
        }
        return normalize(raw);
    }

    std::size_t dim() const override { return config_.dim; }
    std::string fingerprint() const override { return config_.fingerprint(); }

private:
    EmbedderConfig config_;
    HttpUrl url_;
    mutable std::mutex mutex_;
};

}  // namespace

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config) {
    config.validate();
    if (config.kind == EmbedderKind::deterministic_test) {
        return std::make_unique<DeterministicEmbedder>(config);
    }
    return std::make_unique<RemoteEmbedder>(config);
}

Embedding embed_text(const std::string& text, const EmbedderConfig& config) {
    return make_embedder(config)->embed(text);
}

}  // namespace toolgate
