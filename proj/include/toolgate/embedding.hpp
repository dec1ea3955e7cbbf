#pragma once

#include <memory>
#include <string>
#include <vector>

#include "toolgate/errors.hpp"

namespace toolgate {

/// Unit-norm latent vector. Produced by an Embedder or by normalize();
/// invariants (finite values, norm 1) are enforced at those boundaries.
struct Embedding {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
    bool operator==(const Embedding& other) const = default;
};

double dot(const Embedding& a, const Embedding& b);
double norm(const std::vector<double>& values);

/// Cosine similarity in [-1, 1]. Throws DimensionMismatch on unequal dims,
/// ZeroVector if either norm is below the 1e-12 floor.
double cosine_similarity(const Embedding& a, const Embedding& b);

/// Scale a raw vector to unit norm, preserving direction.
/// Throws ZeroVector below the 1e-12 norm floor, InvalidArgument on NaN/Inf.
Embedding normalize(const std::vector<double>& raw);

constexpr double kNormFloor = 1e-12;
constexpr std::size_t kDefaultDim = 768;

enum class EmbedderKind { deterministic_test, remote_http };

struct EmbedderConfig {
    EmbedderKind kind = EmbedderKind::deterministic_test;
    std::string endpoint;  // remote-http only; TOOLGATE_EMBED_ENDPOINT overrides
    std::string model_name;
    std::size_t dim = kDefaultDim;
    double timeout_s = 30.0;

    void validate() const;
    std::string fingerprint() const;  // kind + model + dim; stamped into indexes
};

/// Shared-safe embedding handle. Implementations are either pure functions
/// (deterministic) or serialize their own remote requests.
class Embedder {
public:
    virtual ~Embedder() = default;

    /// Embed one text. Throws EmptyText if text is empty after trimming,
    /// RemoteUnavailable / DimensionMismatch for remote failures.
    virtual Embedding embed(const std::string& text) const = 0;

    virtual std::size_t dim() const = 0;
    virtual std::string fingerprint() const = 0;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config);

/// One-shot convenience over make_embedder.
Embedding embed_text(const std::string& text, const EmbedderConfig& config);

}  // namespace toolgate
