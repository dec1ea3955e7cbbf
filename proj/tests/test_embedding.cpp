#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "toolgate/embedding.hpp"

using namespace toolgate;

namespace {

std::vector<double> random_vector(std::mt19937& rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(dim);
    for (auto& x : v) x = gauss(rng);
    return v;
}

std::string random_words(std::mt19937& rng, int max_words) {
    std::uniform_int_distribution<int> word_count(1, max_words);
    std::uniform_int_distribution<int> word_len(1, 8);
    std::uniform_int_distribution<int> letter(0, 25);
    std::string text;
    int n = word_count(rng);
    for (int w = 0; w < n; ++w) {
        if (w) text += ' ';
        int len = word_len(rng);
        for (int i = 0; i < len; ++i) text += static_cast<char>('a' + letter(rng));
    }
    return text;
}

}  // namespace

TEST_CASE("normalize maps raw vectors onto the unit sphere") {
    auto e = normalize({3.0, 4.0});
    CHECK(e.values[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(e.values[1] == doctest::Approx(0.8).epsilon(1e-12));

    auto axis = normalize({0.0, 0.0, 5.0});
    CHECK(axis.values == std::vector<double>{0.0, 0.0, 1.0});

    CHECK_THROWS_AS(normalize({1e-30, 0.0}), Error);
    try {
        normalize({1e-30, 0.0});
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::ZeroVector);
    }
    CHECK_THROWS_AS(normalize({std::nan(""), 1.0}), Error);
}

TEST_CASE("normalize is idempotent") {
    std::mt19937 rng(7);
    for (int i = 0; i < 50; ++i) {
        auto v = random_vector(rng, 16);
        auto once = normalize(v);
        auto twice = normalize(once.values);
        for (std::size_t d = 0; d < once.dim(); ++d) {
            CHECK(std::abs(once.values[d] - twice.values[d]) < 1e-12);
        }
    }
}

TEST_CASE("cosine similarity on analytic cases") {
    Embedding ex{{1.0, 0.0}};
    Embedding ey{{0.0, 1.0}};
    Embedding diag{{1.0, 1.0}};
    CHECK(cosine_similarity(ex, ex) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine_similarity(ex, ey) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cosine_similarity(diag, ex) == doctest::Approx(0.70710678).epsilon(1e-9));

    CHECK_THROWS_AS(cosine_similarity(ex, Embedding{{1.0, 0.0, 0.0}}), Error);
    CHECK_THROWS_AS(cosine_similarity(ex, Embedding{{0.0, 0.0}}), Error);
}

TEST_CASE("cosine similarity is symmetric and scale invariant") {
    std::mt19937 rng(11);
    for (int i = 0; i < 100; ++i) {
        auto a = Embedding{random_vector(rng, 12)};
        auto b = Embedding{random_vector(rng, 12)};
        CHECK(std::abs(cosine_similarity(a, b) - cosine_similarity(b, a)) < 1e-12);

        double scale = std::uniform_real_distribution<double>(0.1, 50.0)(rng);
        Embedding scaled{a.values};
        for (auto& v : scaled.values) v *= scale;
        CHECK(cosine_similarity(a, scaled) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("deterministic embedder honors the embedding contract") {
    EmbedderConfig config;
    config.dim = 4;
    auto e = embed_text("weather tool", config);
    CHECK(e.dim() == 4);
    CHECK(norm(e.values) == doctest::Approx(1.0).epsilon(1e-6));

    auto again = embed_text("weather tool", config);
    CHECK(e.values == again.values);
    CHECK(cosine_similarity(e, again) == doctest::Approx(1.0));
}

TEST_CASE("deterministic embedder is a pure function of (text, dim)") {
    EmbedderConfig config;
    config.dim = 32;
    auto embedder = make_embedder(config);
    std::mt19937 rng(23);
    for (int i = 0; i < 40; ++i) {
        auto text = random_words(rng, 6);
        auto first = embedder->embed(text);
        auto second = embedder->embed(text);
        // bitwise identical, not just approximately equal
        REQUIRE(first.values.size() == second.values.size());
        for (std::size_t d = 0; d < first.values.size(); ++d) {
            CHECK(std::memcmp(&first.values[d], &second.values[d], sizeof(double)) == 0);
        }
    }
}

TEST_CASE("neighboring texts embed to distinct directions") {
    EmbedderConfig config;
    config.dim = 16;
    auto embedder = make_embedder(config);
    double cosine = cosine_similarity(embedder->embed("abc"), embedder->embed("abd"));
    CHECK(cosine < 1.0);
    // regression pin for the hash-projection scheme
    CHECK(cosine == doctest::Approx(0.20764782805411877).epsilon(1e-12));
}

TEST_CASE("shared tokens raise similarity") {
    EmbedderConfig config;
    config.dim = 64;
    auto embedder = make_embedder(config);
    auto base = embedder->embed("fetch the current weather for a city");
    auto close = embedder->embed("fetch the current weather forecast");
    auto far = embedder->embed("translate text into french");
    CHECK(cosine_similarity(base, close) > cosine_similarity(base, far));
}

TEST_CASE("embedding empty text is an error") {
    EmbedderConfig config;
    config.dim = 8;
    auto embedder = make_embedder(config);
    CHECK_THROWS_AS(embedder->embed(""), Error);
    try {
        embedder->embed("   \t  ");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::EmptyText);
    }
}

TEST_CASE("one embedder handle is safe to share across threads") {
    EmbedderConfig config;
    config.dim = 64;
    auto embedder = make_embedder(config);

    std::vector<std::string> texts;
    for (int i = 0; i < 8; ++i) texts.push_back("shared text number " + std::to_string(i));
    std::vector<Embedding> reference;
    for (const auto& text : texts) reference.push_back(embedder->embed(text));

    std::vector<std::thread> workers;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 4; ++t) {
        workers.emplace_back([&] {
            for (int round = 0; round < 50; ++round) {
                std::size_t i = static_cast<std::size_t>(round) % texts.size();
                if (!(embedder->embed(texts[i]).values == reference[i].values)) {
                    ++mismatches;
                }
            }
        });
    }
    for (auto& worker : workers) worker.join();
    CHECK(mismatches == 0);
}

TEST_CASE("embedder config validation") {
    EmbedderConfig remote;
    remote.kind = EmbedderKind::remote_http;
    CHECK_THROWS_AS(remote.validate(), Error);  // endpoint missing

    EmbedderConfig zero_dim;
    zero_dim.dim = 0;
    CHECK_THROWS_AS(zero_dim.validate(), Error);

    EmbedderConfig det;
    det.model_name = "hash";
    det.dim = 768;
    CHECK(det.fingerprint() == "deterministic-test:hash:768");
}
