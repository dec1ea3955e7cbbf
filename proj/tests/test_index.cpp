#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "toolgate/index.hpp"

using namespace toolgate;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "toolgate_index_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::vector<ToolSpec> many_tools(int count) {
    std::vector<ToolSpec> tools;
    for (int i = 0; i < count; ++i) {
        ToolSpec tool;
        tool.id = "tool_" + std::to_string(i);
        tool.name = tool.id;
        tool.description = "does operation number " + std::to_string(i) + " on the input";
        tools.push_back(std::move(tool));
    }
    return tools;
}

const Embedder& shared_embedder() {
    static auto embedder = [] {
        EmbedderConfig config;
        config.dim = 48;
        return make_embedder(config);
    }();
    return *embedder;
}

bool bitwise_equal(const Embedding& a, const Embedding& b) {
    if (a.values.size() != b.values.size()) return false;
    return std::memcmp(a.values.data(), b.values.data(),
                       a.values.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("level 1 holds one entry per tool") {
    auto tools = many_tools(51);
    auto index = build_level1(tools, shared_embedder());
    CHECK(index.entries.size() == 51);
    CHECK(index.dim == 48);
    CHECK(index.embedder_fingerprint == shared_embedder().fingerprint());
    for (const auto& entry : index.entries) {
        CHECK(norm(entry.embedding.values) == doctest::Approx(1.0).epsilon(1e-6));
    }

    auto single = build_level1({tools[0]}, shared_embedder());
    REQUIRE(single.entries.size() == 1);
    auto self_query = shared_embedder().embed(tools[0].name + ": " + tools[0].description);
    CHECK(cosine_similarity(single.entries[0].embedding, self_query) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tools sharing name and description embed identically") {
    ToolSpec a{"id_a", "shared_name", "same description text", nlohmann::json::object()};
    ToolSpec b{"id_b", "shared_name", "same description text", nlohmann::json::object()};
    auto index = build_level1({a, b}, shared_embedder());
    CHECK(cosine_similarity(index.entries[0].embedding, index.entries[1].embedding) ==
          doctest::Approx(1.0));
}

TEST_CASE("duplicate tool ids are rejected") {
    auto tools = many_tools(2);
    tools[1].id = tools[0].id;
    CHECK_THROWS_AS(build_level1(tools, shared_embedder()), Error);
    CHECK_THROWS_AS(build_level1({}, shared_embedder()), Error);
}

TEST_CASE("identical corpus texts land in one cluster with merged tools") {
    auto tools = many_tools(2);
    std::vector<AugmentedQuery> corpus = {
        {"q1", "do the thing with the data", "cat", {"tool_0"}, QueryOrigin::seed, {}},
        {"q2", "do the thing with the data", "cat", {"tool_1"}, QueryOrigin::seed, {}},
    };
    auto index = build_level2(corpus, tools, shared_embedder(), 0.5);
    REQUIRE(index.clusters.size() == 1);
    CHECK(index.clusters[0].tool_ids == std::vector<std::string>{"tool_0", "tool_1"});
    CHECK(index.clusters[0].member_query_ids == std::vector<std::string>{"q1", "q2"});
}

TEST_CASE("threshold zero keeps every distinct query its own cluster") {
    auto tools = many_tools(6);
    std::vector<AugmentedQuery> corpus;
    for (int i = 0; i < 6; ++i) {
        corpus.push_back({"q" + std::to_string(i),
                          "completely different text number " + std::to_string(i),
                          "cat",
                          {"tool_" + std::to_string(i)},
                          QueryOrigin::seed,
                          {}});
    }
    auto index = build_level2(corpus, tools, shared_embedder(), 0.0);
    REQUIRE(index.clusters.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CHECK(index.clusters[i].tool_ids == corpus[i].gold_tools);
    }
}

TEST_CASE("cluster tool sets are exactly the union of member gold tools") {
    auto tools = fixtures::synthetic_tools();
    auto corpus = fixtures::synthetic_corpus();
    auto index = build_level2(corpus, tools, shared_embedder(), 0.5);
    CHECK(index.clusters.size() >= 1);
    CHECK(index.clusters.size() <= corpus.size());

    // brute recomputation of every cluster's union from the corpus
    for (const auto& cluster : index.clusters) {
        std::set<std::string> expected;
        for (const auto& member : cluster.member_query_ids) {
            for (const auto& query : corpus) {
                if (query.id != member) continue;
                expected.insert(query.gold_tools.begin(), query.gold_tools.end());
            }
        }
        CHECK(cluster.tool_ids == std::vector<std::string>(expected.begin(), expected.end()));
        CHECK(norm(cluster.centroid.values) == doctest::Approx(1.0).epsilon(1e-6));
    }

    // every query appears in exactly one cluster
    std::set<std::string> seen;
    std::size_t total = 0;
    for (const auto& cluster : index.clusters) {
        total += cluster.member_query_ids.size();
        seen.insert(cluster.member_query_ids.begin(), cluster.member_query_ids.end());
    }
    CHECK(total == corpus.size());
    CHECK(seen.size() == corpus.size());
}

TEST_CASE("unknown gold tools abort the level 2 build") {
    auto tools = many_tools(1);
    std::vector<AugmentedQuery> corpus = {
        {"q1", "text", "cat", {"no_such_tool"}, QueryOrigin::seed, {}},
    };
    try {
        build_level2(corpus, tools, shared_embedder(), 0.5);
        FAIL("expected UnknownToolId");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::UnknownToolId);
    }
}

TEST_CASE("index persistence round-trips exactly") {
    auto tools = many_tools(51);
    auto l1 = build_level1(tools, shared_embedder());
    auto path = temp_file("roundtrip.l1.json");
    save_index(l1, path.string());
    auto loaded = load_level1(path.string());
    CHECK(loaded == l1);
    for (std::size_t i = 0; i < l1.entries.size(); ++i) {
        CHECK(bitwise_equal(loaded.entries[i].embedding, l1.entries[i].embedding));
    }

    auto corpus = fixtures::synthetic_corpus();
    auto l2 = build_level2(corpus, fixtures::synthetic_tools(), shared_embedder(), 0.5);
    auto path2 = temp_file("roundtrip.l2.json");
    save_index(l2, path2.string());
    auto loaded2 = load_level2(path2.string());
    CHECK(loaded2 == l2);
}

TEST_CASE("schema version mismatches are reported as such") {
    auto l1 = build_level1(many_tools(3), shared_embedder());
    auto path = temp_file("version.l1.json");
    save_index(l1, path.string());

    std::ifstream in(path);
    nlohmann::json doc = nlohmann::json::parse(in);
    in.close();
    doc["schema_version"] = 999;
    std::ofstream out(path);
    out << doc.dump();
    out.close();

    try {
        load_level1(path.string());
        FAIL("expected SchemaVersionMismatch");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::SchemaVersionMismatch);
    }
}

TEST_CASE("truncated and corrupted index files never load") {
    auto l1 = build_level1(many_tools(5), shared_embedder());
    auto path = temp_file("corrupt.l1.json");
    save_index(l1, path.string());

    std::ifstream in(path, std::ios::binary);
    std::string contents((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
    in.close();

    {
        std::ofstream out(path, std::ios::binary);
        out << contents.substr(0, contents.size() / 2);
    }
    try {
        load_level1(path.string());
        FAIL("expected CorruptIndex");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::CorruptIndex);
    }

    // single-byte corruption fuzz: always a declared error, never a crash
    std::mt19937 rng(17);
    std::uniform_int_distribution<std::size_t> pos_dist(0, contents.size() - 1);
    std::uniform_int_distribution<int> byte_dist(32, 126);
    for (int round = 0; round < 50; ++round) {
        std::string mutated = contents;
        std::size_t pos = pos_dist(rng);
        char replacement = static_cast<char>(byte_dist(rng));
        if (replacement == mutated[pos]) replacement = replacement == 'x' ? 'y' : 'x';
        mutated[pos] = replacement;
        {
            std::ofstream out(path, std::ios::binary);
            out << mutated;
        }
        try {
            auto loaded = load_level1(path.string());
            // a corrupted byte inside a trailing newline or similar may still
            // parse; the checksum must then have matched
            CHECK(loaded.entries.size() == 5);
        } catch (const Error& error) {
            bool declared = error.code() == ErrorCode::CorruptIndex ||
                            error.code() == ErrorCode::SchemaVersionMismatch;
            CHECK(declared);
        }
    }
}

TEST_CASE("wrong-kind index files are rejected") {
    auto l1 = build_level1(many_tools(3), shared_embedder());
    auto path = temp_file("kind.l1.json");
    save_index(l1, path.string());
    CHECK_THROWS_AS(load_level2(path.string()), Error);
}

TEST_CASE("missing index files surface IoFailure") {
    try {
        load_level1(temp_file("does_not_exist.l1.json").string());
        FAIL("expected IoFailure");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::IoFailure);
    }
}

TEST_CASE("corpus jsonl round-trips") {
    auto corpus = fixtures::synthetic_corpus();
    corpus[0].origin = QueryOrigin::generated;
    corpus[0].rouge_vs_seed = 0.625;
    auto path = temp_file("corpus.jsonl");
    save_corpus_jsonl(corpus, path.string());
    auto loaded = load_corpus_jsonl(path.string());
    CHECK(loaded == corpus);
}

TEST_CASE("corpus schema violations carry the line number") {
    auto path = temp_file("bad_corpus.jsonl");
    {
        std::ofstream out(path);
        out << R"({"id":"a","text":"fine","category":"c","gold_tools":["t"]})" << '\n';
        out << R"({"id":"b","text":"missing tools","category":"c"})" << '\n';
    }
    try {
        load_corpus_jsonl(path.string());
        FAIL("expected SchemaError");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::SchemaError);
        CHECK(std::string(error.what()).find("line 2") != std::string::npos);
    }
}
