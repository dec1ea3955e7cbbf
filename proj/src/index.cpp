#include "toolgate/index.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "toolgate/hashing.hpp"

namespace toolgate {

namespace {

std::string checksum_of(const nlohmann::json& payload) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload.dump())));
    return std::string("fnv1a64:") + buf;
}

nlohmann::json embedding_to_json(const Embedding& e) {
    nlohmann::json arr = nlohmann::json::array();
    for (double v : e.values) arr.push_back(v);
    return arr;
}

Embedding embedding_from_json(const nlohmann::json& arr) {
    if (!arr.is_array()) {
        throw Error(ErrorCode::CorruptIndex, "embedding is not an array");
    }
    Embedding e;
    e.values.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) {
            throw Error(ErrorCode::CorruptIndex, "non-numeric embedding component");
        }
        e.values.push_back(v.get<double>());
    }
    return e;
}

void write_document(const nlohmann::json& payload, const char* kind,
                    const std::string& path) {
    nlohmann::json doc = {
        {"schema_version", kIndexSchemaVersion},
        {"kind", kind},
        {"checksum", checksum_of(payload)},
        {"payload", payload},
    };
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path + " for writing");
    }
    out << doc.dump();
    out << '\n';
    if (!out) {
        throw Error(ErrorCode::IoFailure, "write failed for " + path);
    }
}

nlohmann::json read_document(const std::string& path, const char* expected_kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open index file " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();

    auto doc = nlohmann::json::parse(buffer.str(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(ErrorCode::CorruptIndex, "unparsable index file " + path);
    }
    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
        throw Error(ErrorCode::CorruptIndex, "missing schema_version in " + path);
    }
    if (doc["schema_version"].get<int>() != kIndexSchemaVersion) {
        throw Error(ErrorCode::SchemaVersionMismatch,
                    "index schema_version " + doc["schema_version"].dump() +
                        ", expected " + std::to_string(kIndexSchemaVersion));
    }
    if (!doc.contains("kind") || doc["kind"] != expected_kind) {
        throw Error(ErrorCode::CorruptIndex,
                    std::string("index kind is not '") + expected_kind + "' in " + path);
    }
    if (!doc.contains("payload") || !doc["payload"].is_object() ||
        !doc.contains("checksum") || !doc["checksum"].is_string()) {
        throw Error(ErrorCode::CorruptIndex, "missing payload/checksum in " + path);
    }
    if (checksum_of(doc["payload"]) != doc["checksum"].get<std::string>()) {
        throw Error(ErrorCode::CorruptIndex, "checksum mismatch in " + path);
    }
    return doc["payload"];
}

std::size_t read_dim(const nlohmann::json& payload) {
    if (!payload.contains("dim") || !payload["dim"].is_number_unsigned()) {
        throw Error(ErrorCode::CorruptIndex, "missing dim");
    }
    return payload["dim"].get<std::size_t>();
}

std::string read_string(const nlohmann::json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_string()) {
        throw Error(ErrorCode::CorruptIndex, std::string("missing string field ") + key);
    }
    return obj[key].get<std::string>();
}

std::vector<std::string> read_string_array(const nlohmann::json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_array()) {
        throw Error(ErrorCode::CorruptIndex, std::string("missing array field ") + key);
    }
    std::vector<std::string> out;
    for (const auto& v : obj[key]) {
        if (!v.is_string()) {
            throw Error(ErrorCode::CorruptIndex, std::string("non-string entry in ") + key);
        }
        out.push_back(v.get<std::string>());
    }
    return out;
}

}  // namespace

Level1Index build_level1(const std::vector<ToolSpec>& tools, const Embedder& embedder) {
    if (tools.empty()) {
        throw Error(ErrorCode::EmptyInput, "no tools to index");
    }
    validate_tool_set(tools);

    Level1Index index;
    index.dim = embedder.dim();
    index.embedder_fingerprint = embedder.fingerprint();
    index.entries.reserve(tools.size());
    for (const auto& tool : tools) {
        index.entries.push_back({tool.id, embedder.embed(tool.name + ": " + tool.description)});
    }
    return index;
}

Level2Index build_level2(const std::vector<AugmentedQuery>& corpus,
                         const std::vector<ToolSpec>& tools, const Embedder& embedder,
                         double distance_threshold) {
    if (corpus.empty()) {
        throw Error(ErrorCode::EmptyInput, "empty corpus");
    }
    std::unordered_set<std::string> known;
    for (const auto& tool : tools) known.insert(tool.id);
    for (const auto& query : corpus) {
        if (query.gold_tools.empty()) {
            throw Error(ErrorCode::InvalidArgument,
                        "query '" + query.id + "' has no gold tools");
        }
        for (const auto& tool_id : query.gold_tools) {
            if (!known.count(tool_id)) {
                throw Error(ErrorCode::UnknownToolId,
                            "query '" + query.id + "' references unknown tool '" +
                                tool_id + "'");
            }
        }
    }

    std::vector<Embedding> points;
    points.reserve(corpus.size());
    for (const auto& query : corpus) points.push_back(embedder.embed(query.text));

    auto clustering = agglomerative_cluster(points, distance_threshold);
    int count = clustering.cluster_count();

    Level2Index index;
    index.linkage = "average";
    index.distance_threshold = distance_threshold;
    index.dim = embedder.dim();
    index.embedder_fingerprint = embedder.fingerprint();
    index.clusters.resize(count);

    for (int label = 0; label < count; ++label) {
        index.clusters[label].id = "c" + std::to_string(label);
    }
    std::vector<std::vector<double>> sums(count,
                                          std::vector<double>(embedder.dim(), 0.0));
    std::vector<std::set<std::string>> unions(count);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        int label = clustering.labels[i];
        auto& cluster = index.clusters[label];
        cluster.member_query_ids.push_back(corpus[i].id);
        for (std::size_t d = 0; d < points[i].dim(); ++d) {
            sums[label][d] += points[i].values[d];
        }
        unions[label].insert(corpus[i].gold_tools.begin(), corpus[i].gold_tools.end());
    }
    for (int label = 0; label < count; ++label) {
        auto& sum = sums[label];
        double members = static_cast<double>(index.clusters[label].member_query_ids.size());
        for (double& v : sum) v /= members;
        index.clusters[label].centroid = normalize(sum);
        index.clusters[label].tool_ids.assign(unions[label].begin(), unions[label].end());
    }
    return index;
}

void save_index(const Level1Index& index, const std::string& path) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& entry : index.entries) {
        entries.push_back({{"tool_id", entry.tool_id},
                           {"embedding", embedding_to_json(entry.embedding)}});
    }
    nlohmann::json payload = {
        {"dim", index.dim},
        {"embedder_fingerprint", index.embedder_fingerprint},
        {"entries", entries},
    };
    write_document(payload, "level1", path);
}

void save_index(const Level2Index& index, const std::string& path) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& cluster : index.clusters) {
        clusters.push_back({{"id", cluster.id},
                            {"member_query_ids", cluster.member_query_ids},
                            {"centroid", embedding_to_json(cluster.centroid)},
                            {"tool_ids", cluster.tool_ids}});
    }
    nlohmann::json payload = {
        {"dim", index.dim},
        {"embedder_fingerprint", index.embedder_fingerprint},
        {"linkage", index.linkage},
        {"distance_threshold", index.distance_threshold},
        {"clusters", clusters},
    };
    write_document(payload, "level2", path);
}

Level1Index load_level1(const std::string& path) {
    auto payload = read_document(path, "level1");
    Level1Index index;
    index.dim = read_dim(payload);
    index.embedder_fingerprint = read_string(payload, "embedder_fingerprint");
    if (!payload.contains("entries") || !payload["entries"].is_array()) {
        throw Error(ErrorCode::CorruptIndex, "missing entries array");
    }
    for (const auto& item : payload["entries"]) {
        if (!item.is_object()) {
            throw Error(ErrorCode::CorruptIndex, "entry is not an object");
        }
        Level1Entry entry;
        entry.tool_id = read_string(item, "tool_id");
        entry.embedding = embedding_from_json(item.value("embedding", nlohmann::json()));
        index.entries.push_back(std::move(entry));
    }
    return index;
}

Level2Index load_level2(const std::string& path) {
    auto payload = read_document(path, "level2");
    Level2Index index;
    index.dim = read_dim(payload);
    index.embedder_fingerprint = read_string(payload, "embedder_fingerprint");
    index.linkage = read_string(payload, "linkage");
    if (!payload.contains("distance_threshold") ||
        !payload["distance_threshold"].is_number()) {
        throw Error(ErrorCode::CorruptIndex, "missing distance_threshold");
    }
    index.distance_threshold = payload["distance_threshold"].get<double>();
    if (!payload.contains("clusters") || !payload["clusters"].is_array()) {
        throw Error(ErrorCode::CorruptIndex, "missing clusters array");
    }
    for (const auto& item : payload["clusters"]) {
        if (!item.is_object()) {
            throw Error(ErrorCode::CorruptIndex, "cluster is not an object");
        }
        ToolCluster cluster;
        cluster.id = read_string(item, "id");
        cluster.member_query_ids = read_string_array(item, "member_query_ids");
        cluster.centroid = embedding_from_json(item.value("centroid", nlohmann::json()));
        cluster.tool_ids = read_string_array(item, "tool_ids");
        index.clusters.push_back(std::move(cluster));
    }
    return index;
}

namespace {

AugmentedQuery query_from_json(const nlohmann::json& item, std::size_t line_number) {
    auto fail = [line_number](const std::string& what) -> Error {
        return Error(ErrorCode::SchemaError,
                     "corpus line " + std::to_string(line_number) + ": " + what);
    };
    if (!item.is_object()) throw fail("not a JSON object");
    AugmentedQuery query;
    if (!item.contains("id") || !item["id"].is_string()) throw fail("missing id");
    query.id = item["id"].get<std::string>();
    if (!item.contains("text") || !item["text"].is_string()) throw fail("missing text");
    query.text = item["text"].get<std::string>();
    query.category = item.value("category", std::string{});
    if (!item.contains("gold_tools") || !item["gold_tools"].is_array() ||
        item["gold_tools"].empty()) {
        throw fail("gold_tools must be a non-empty array");
    }
    for (const auto& tool : item["gold_tools"]) {
        if (!tool.is_string()) throw fail("gold_tools entries must be strings");
        query.gold_tools.push_back(tool.get<std::string>());
    }
    std::string origin = item.value("origin", std::string{"seed"});
    if (origin == "seed") {
        query.origin = QueryOrigin::seed;
    } else if (origin == "generated") {
        query.origin = QueryOrigin::generated;
    } else {
        throw fail("origin must be 'seed' or 'generated'");
    }
    if (item.contains("rouge_vs_seed") && item["rouge_vs_seed"].is_number()) {
        query.rouge_vs_seed = item["rouge_vs_seed"].get<double>();
    }
    return query;
}

}  // namespace

std::vector<AugmentedQuery> load_corpus_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open corpus file " + path);
    }
    std::vector<AugmentedQuery> corpus;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto item = nlohmann::json::parse(line, nullptr, false);
        if (item.is_discarded()) {
            throw Error(ErrorCode::SchemaError,
                        "corpus line " + std::to_string(line_number) + ": bad JSON");
        }
        corpus.push_back(query_from_json(item, line_number));
    }
    return corpus;
}

void save_corpus_jsonl(const std::vector<AugmentedQuery>& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path + " for writing");
    }
    for (const auto& query : corpus) {
        nlohmann::json item = {
            {"id", query.id},
            {"text", query.text},
            {"category", query.category},
            {"gold_tools", query.gold_tools},
            {"origin", query.origin == QueryOrigin::seed ? "seed" : "generated"},
        };
        if (query.rouge_vs_seed) item["rouge_vs_seed"] = *query.rouge_vs_seed;
        out << item.dump() << '\n';
    }
    if (!out) {
        throw Error(ErrorCode::IoFailure, "write failed for " + path);
    }
}

}  // namespace toolgate
