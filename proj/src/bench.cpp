#include "toolgate/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace toolgate {

std::vector<BenchQuery> load_benchmark(const std::string& path,
                                       const std::vector<ToolSpec>& tools) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open benchmark file " + path);
    }
    std::set<std::string> known;
    for (const auto& tool : tools) known.insert(tool.name);

    std::vector<BenchQuery> bench;
    std::set<std::string> offenders;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fail = [line_number](const std::string& what) -> Error {
            return Error(ErrorCode::SchemaError,
                         "benchmark line " + std::to_string(line_number) + ": " + what);
        };
        auto item = nlohmann::json::parse(line, nullptr, false);
        if (item.is_discarded() || !item.is_object()) throw fail("bad JSON");

        BenchQuery query;
        if (!item.contains("id") || !item["id"].is_string()) throw fail("missing id");
        query.id = item["id"].get<std::string>();
        if (!item.contains("text") || !item["text"].is_string()) throw fail("missing text");
        query.text = item["text"].get<std::string>();
        query.category = item.value("category", std::string{});
        query.sequential = item.value("sequential", false);
        if (!item.contains("gold_calls") || !item["gold_calls"].is_array() ||
            item["gold_calls"].empty()) {
            throw fail("gold_calls must be a non-empty array");
        }
        for (const auto& call : item["gold_calls"]) {
            if (!call.is_object() || !call.contains("tool_name") ||
                !call["tool_name"].is_string()) {
                throw fail("gold call missing tool_name");
            }
            GoldCall gold;
            gold.tool_name = call["tool_name"].get<std::string>();
            gold.arguments = call.value("arguments", nlohmann::json::object());
            if (!gold.arguments.is_object()) throw fail("arguments must be an object");
            if (!known.count(gold.tool_name)) offenders.insert(gold.tool_name);
            query.gold_calls.push_back(std::move(gold));
        }
        bench.push_back(std::move(query));
    }
    if (!offenders.empty()) {
        std::string list;
        for (const auto& name : offenders) {
            if (!list.empty()) list += ", ";
            list += name;
        }
        throw Error(ErrorCode::UnknownGoldTool,
                    "gold tools not in the tool set: " + list);
    }
    return bench;
}

bool judge_tool_accuracy(const std::vector<PredictedCall>& predicted,
                         const std::vector<GoldCall>& gold, bool sequential) {
    if (predicted.size() != gold.size()) return false;
    if (sequential) {
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (predicted[i].name != gold[i].tool_name) return false;
        }
        return true;
    }
    std::multiset<std::string> predicted_names, gold_names;
    for (const auto& call : predicted) predicted_names.insert(call.name);
    for (const auto& call : gold) gold_names.insert(call.tool_name);
    return predicted_names == gold_names;
}

namespace {

bool numeric_string(const std::string& text) {
    if (text.empty()) return false;
    std::size_t consumed = 0;
    try {
        (void)std::stod(text, &consumed);
    } catch (const std::exception&) {
        return false;
    }
    return consumed == text.size();
}

// Kind compatibility, not value equality: the judged property is whether the
// model supplied the right argument shape.
bool type_compatible(const nlohmann::json& gold, const nlohmann::json& predicted) {
    if (gold.is_string()) return predicted.is_string();
    if (gold.is_number()) {
        if (predicted.is_number()) return true;
        return predicted.is_string() && numeric_string(predicted.get<std::string>());
    }
    if (gold.is_boolean()) return predicted.is_boolean();
    if (gold.is_array()) return predicted.is_array();
    if (gold.is_object()) return predicted.is_object();
    if (gold.is_null()) return predicted.is_null();
    return false;
}

bool arguments_compatible(const nlohmann::json& gold_args, const nlohmann::json& predicted_args) {
    if (!predicted_args.is_object()) return false;
    for (auto it = gold_args.begin(); it != gold_args.end(); ++it) {
        if (!predicted_args.contains(it.key())) return false;
        if (!type_compatible(it.value(), predicted_args[it.key()])) return false;
    }
    return true;  // extra predicted arguments are fine
}

}  // namespace

bool judge_success(const std::vector<PredictedCall>& predicted,
                   const std::vector<GoldCall>& gold, bool sequential) {
    if (!judge_tool_accuracy(predicted, gold, sequential)) return false;
    if (sequential) {
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (!arguments_compatible(gold[i].arguments, predicted[i].arguments)) return false;
        }
        return true;
    }
    // Greedy name matching; duplicates consume distinct predicted calls.
    std::vector<bool> used(predicted.size(), false);
    for (const auto& gold_call : gold) {
        bool matched = false;
        for (std::size_t j = 0; j < predicted.size(); ++j) {
            if (used[j] || predicted[j].name != gold_call.tool_name) continue;
            if (arguments_compatible(gold_call.arguments, predicted[j].arguments)) {
                used[j] = true;
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

RunReport evaluate(const std::vector<BenchQuery>& bench, const std::vector<ToolSpec>& tools,
                   const Level1Index& l1, const Level2Index& l2, LlmClient& llm,
                   const Embedder& embedder, const EvaluateOptions& options) {
    if (bench.empty()) {
        throw Error(ErrorCode::EmptyInput, "empty benchmark");
    }
    RunConfig config;
    config.mode = options.mode;
    config.k = options.k;
    config.floor = options.floor;
    config.model = options.model;
    config.recommender_template = options.recommender_template;

    RunReport report;
    report.mode = options.mode == RunMode::lis ? "lis" : "all-tools";
    report.k = options.k;
    report.model = options.model;
    report.label = report.mode + "-k" + std::to_string(options.k);

    for (const auto& query : bench) {
        QueryRunResult run;
        try {
            run = run_query(query.text, l1, l2, tools, llm, embedder, config);
        } catch (const Error&) {
            report.partial = true;  // fatal transport error; keep what we have
            break;
        }
        EvalRecord record;
        record.query_id = query.id;
        record.decision = run.decision;
        if (run.response.kind == ResponseKind::tool_calls) {
            record.predicted_calls = run.response.tool_calls;
        }
        record.tool_correct =
            judge_tool_accuracy(record.predicted_calls, query.gold_calls, query.sequential);
        record.success =
            judge_success(record.predicted_calls, query.gold_calls, query.sequential);
        if (record.success && !record.tool_correct) {
            throw Error(ErrorCode::InvalidArgument,
                        "metric invariant violated: success without tool_correct");
        }
        record.wall_time_s = run.timings.total_s;
        record.recommender_time_s = run.timings.recommend_s;
        record.prompt_tokens = run.prompt_tokens;
        record.tokens_estimated = run.tokens_estimated;
        record.start_unix_s = run.start_unix_s;
        record.end_unix_s = run.end_unix_s;
        report.records.push_back(std::move(record));
    }

    report.query_count = report.records.size();
    if (!report.records.empty()) {
        double successes = 0, correct = 0, wall = 0, rec = 0, tokens = 0;
        for (const auto& record : report.records) {
            successes += record.success ? 1.0 : 0.0;
            correct += record.tool_correct ? 1.0 : 0.0;
            wall += record.wall_time_s;
            rec += record.recommender_time_s;
            tokens += static_cast<double>(record.prompt_tokens);
            report.tokens_estimated |= record.tokens_estimated;
        }
        double n = static_cast<double>(report.records.size());
        report.success_rate = successes / n;
        report.tool_accuracy = correct / n;
        report.mean_wall_time_s = wall / n;
        report.mean_recommender_time_s = rec / n;
        report.mean_prompt_tokens = tokens / n;
    }

    if (options.power_log_path) {
        auto samples = load_power_log(*options.power_log_path);
        report.power_gap_fraction = ingest_power_log(samples, report.records);
        refresh_power_metrics(report);
    }
    return report;
}

std::vector<PowerSample> load_power_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open power log " + path);
    }
    std::vector<PowerSample> samples;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        std::string ts_text, power_text;
        if (!std::getline(fields, ts_text, ',') || !std::getline(fields, power_text)) {
            throw Error(ErrorCode::IoFailure,
                        "power log line " + std::to_string(line_number) + ": need ts,power");
        }
        PowerSample sample;
        try {
            sample.timestamp_s = std::stod(ts_text);
            sample.power_w = std::stod(power_text);
        } catch (const std::exception&) {
            if (line_number == 1) continue;  // header row
            throw Error(ErrorCode::IoFailure,
                        "power log line " + std::to_string(line_number) + ": non-numeric");
        }
        if (!samples.empty() && sample.timestamp_s <= samples.back().timestamp_s) {
            throw Error(ErrorCode::NonMonotoneTimestamps,
                        "power log timestamps must strictly increase (line " +
                            std::to_string(line_number) + ")");
        }
        samples.push_back(sample);
    }
    return samples;
}

namespace {

// Piecewise-linear power curve; value at time t within sample coverage.
double power_at(const std::vector<PowerSample>& samples, double t) {
    auto it = std::lower_bound(samples.begin(), samples.end(), t,
                               [](const PowerSample& s, double v) { return s.timestamp_s < v; });
    if (it == samples.begin()) return it->power_w;
    if (it == samples.end()) return samples.back().power_w;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    double span = hi.timestamp_s - lo.timestamp_s;
    double alpha = (t - lo.timestamp_s) / span;
    return lo.power_w + alpha * (hi.power_w - lo.power_w);
}

double trapezoid_energy(const std::vector<PowerSample>& samples, double start, double end) {
    // Integration nodes: window edges plus every interior sample.
    std::vector<double> times{start};
    for (const auto& sample : samples) {
        if (sample.timestamp_s > start && sample.timestamp_s < end) {
            times.push_back(sample.timestamp_s);
        }
    }
    times.push_back(end);
    double energy = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        double dt = times[i] - times[i - 1];
        energy += 0.5 * (power_at(samples, times[i - 1]) + power_at(samples, times[i])) * dt;
    }
    return energy;
}

}  // namespace

double ingest_power_log(const std::vector<PowerSample>& samples,
                        std::vector<EvalRecord>& records) {
    std::size_t gaps = 0;
    for (auto& record : records) {
        bool covered = !samples.empty() && record.start_unix_s >= samples.front().timestamp_s &&
                       record.end_unix_s <= samples.back().timestamp_s &&
                       record.end_unix_s > record.start_unix_s;
        if (!covered) {
            record.energy_j.reset();
            ++gaps;
            continue;
        }
        record.energy_j = trapezoid_energy(samples, record.start_unix_s, record.end_unix_s);
    }
    if (records.empty()) return 1.0;
    return static_cast<double>(gaps) / static_cast<double>(records.size());
}

void refresh_power_metrics(RunReport& report) {
    double power_sum = 0.0;
    std::size_t covered = 0;
    for (const auto& record : report.records) {
        if (!record.energy_j) continue;
        double duration = record.end_unix_s - record.start_unix_s;
        if (duration <= 0.0) continue;
        power_sum += *record.energy_j / duration;
        ++covered;
    }
    if (covered > 0) {
        report.mean_power_w = power_sum / static_cast<double>(covered);
    } else {
        report.mean_power_w.reset();
    }
}

RunReport normalize_report(const RunReport& report, const RunReport& baseline) {
    std::multiset<std::string> ids, baseline_ids;
    for (const auto& record : report.records) ids.insert(record.query_id);
    for (const auto& record : baseline.records) baseline_ids.insert(record.query_id);
    if (ids != baseline_ids) {
        throw Error(ErrorCode::QuerySetMismatch,
                    "normalization requires the identical query set");
    }
    if (baseline.mean_wall_time_s <= 0.0) {
        throw Error(ErrorCode::MissingBaselineMetric, "baseline has no wall-time metric");
    }
    RunReport out = report;
    out.normalized_time = report.mean_wall_time_s / baseline.mean_wall_time_s;
    if (report.mean_power_w) {
        if (!baseline.mean_power_w || *baseline.mean_power_w <= 0.0) {
            throw Error(ErrorCode::MissingBaselineMetric, "baseline has no power metric");
        }
        out.normalized_power = *report.mean_power_w / *baseline.mean_power_w;
    }
    out.baseline_label = baseline.label;
    return out;
}

namespace {

nlohmann::json decision_to_json(const ControllerDecision& decision) {
    return {
        {"level", search_level_name(decision.level)},
        {"selected_tool_ids", decision.selected_tool_ids},
        {"avg_score_l1", decision.avg_score_l1},
        {"avg_score_l2", decision.avg_score_l2},
        {"k", decision.k},
        {"reason", decision_reason_name(decision.reason)},
    };
}

ControllerDecision decision_from_json(const nlohmann::json& item) {
    ControllerDecision decision;
    decision.level = search_level_from_name(item.value("level", std::string{"L3"}));
    for (const auto& id : item.value("selected_tool_ids", nlohmann::json::array())) {
        decision.selected_tool_ids.push_back(id.get<std::string>());
    }
    decision.avg_score_l1 = item.value("avg_score_l1", 0.0);
    decision.avg_score_l2 = item.value("avg_score_l2", 0.0);
    decision.k = item.value("k", 0);
    decision.reason =
        decision_reason_from_name(item.value("reason", std::string{"score-arbitration"}));
    return decision;
}

nlohmann::json record_to_json(const EvalRecord& record) {
    nlohmann::json calls = nlohmann::json::array();
    for (const auto& call : record.predicted_calls) {
        calls.push_back({{"name", call.name}, {"arguments", call.arguments}});
    }
    nlohmann::json item = {
        {"query_id", record.query_id},
        {"decision", decision_to_json(record.decision)},
        {"predicted_calls", calls},
        {"tool_correct", record.tool_correct},
        {"success", record.success},
        {"wall_time_s", record.wall_time_s},
        {"recommender_time_s", record.recommender_time_s},
        {"prompt_tokens", record.prompt_tokens},
        {"tokens_estimated", record.tokens_estimated},
        {"start_unix_s", record.start_unix_s},
        {"end_unix_s", record.end_unix_s},
    };
    if (record.energy_j) item["energy_j"] = *record.energy_j;
    return item;
}

EvalRecord record_from_json(const nlohmann::json& item) {
    EvalRecord record;
    record.query_id = item.value("query_id", std::string{});
    if (item.contains("decision")) record.decision = decision_from_json(item["decision"]);
    for (const auto& call : item.value("predicted_calls", nlohmann::json::array())) {
        PredictedCall predicted;
        predicted.name = call.value("name", std::string{});
        predicted.arguments = call.value("arguments", nlohmann::json::object());
        record.predicted_calls.push_back(std::move(predicted));
    }
    record.tool_correct = item.value("tool_correct", false);
    record.success = item.value("success", false);
    record.wall_time_s = item.value("wall_time_s", 0.0);
    record.recommender_time_s = item.value("recommender_time_s", 0.0);
    record.prompt_tokens = item.value("prompt_tokens", 0L);
    record.tokens_estimated = item.value("tokens_estimated", false);
    record.start_unix_s = item.value("start_unix_s", 0.0);
    record.end_unix_s = item.value("end_unix_s", 0.0);
    if (item.contains("energy_j") && item["energy_j"].is_number()) {
        record.energy_j = item["energy_j"].get<double>();
    }
    return record;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string escaped = "\"";
    for (char c : field) {
        if (c == '"') escaped += "\"\"";
        else escaped += c;
    }
    escaped += "\"";
    return escaped;
}

}  // namespace

void report_emit(const RunReport& report, ReportFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path + " for writing");
    }
    if (format == ReportFormat::json) {
        nlohmann::json records = nlohmann::json::array();
        for (const auto& record : report.records) records.push_back(record_to_json(record));
        nlohmann::json doc = {
            {"schema_version", kReportSchemaVersion},
            {"label", report.label},
            {"mode", report.mode},
            {"k", report.k},
            {"model", report.model},
            {"query_count", report.query_count},
            {"success_rate", report.success_rate},
            {"tool_accuracy", report.tool_accuracy},
            {"mean_wall_time_s", report.mean_wall_time_s},
            {"mean_recommender_time_s", report.mean_recommender_time_s},
            {"mean_prompt_tokens", report.mean_prompt_tokens},
            {"tokens_estimated", report.tokens_estimated},
            {"partial", report.partial},
            {"records", records},
        };
        doc["mean_power_w"] = report.mean_power_w ? nlohmann::json(*report.mean_power_w)
                                                  : nlohmann::json(nullptr);
        doc["power_gap_fraction"] = report.power_gap_fraction
                                        ? nlohmann::json(*report.power_gap_fraction)
                                        : nlohmann::json(nullptr);
        doc["normalized_time"] = report.normalized_time ? nlohmann::json(*report.normalized_time)
                                                        : nlohmann::json(nullptr);
        doc["normalized_power"] = report.normalized_power
                                      ? nlohmann::json(*report.normalized_power)
                                      : nlohmann::json(nullptr);
        doc["baseline_label"] = report.baseline_label;
        out << doc.dump(2) << '\n';
    } else {
        out << "query_id,level,reason,tool_correct,success,wall_time_s,"
               "recommender_time_s,prompt_tokens,tokens_estimated,energy_j,"
               "selected_tool_count\n";
        for (const auto& record : report.records) {
            out << csv_escape(record.query_id) << ','
                << search_level_name(record.decision.level) << ','
                << decision_reason_name(record.decision.reason) << ','
                << (record.tool_correct ? 1 : 0) << ',' << (record.success ? 1 : 0) << ','
                << record.wall_time_s << ',' << record.recommender_time_s << ','
                << record.prompt_tokens << ',' << (record.tokens_estimated ? 1 : 0) << ',';
            if (record.energy_j) out << *record.energy_j;
            out << ',' << record.decision.selected_tool_ids.size() << '\n';
        }
    }
    if (!out) {
        throw Error(ErrorCode::IoFailure, "write failed for " + path);
    }
}

RunReport report_load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open report " + path);
    }
    auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(ErrorCode::SchemaError, "unparsable report " + path);
    }
    if (doc.value("schema_version", 0) != kReportSchemaVersion) {
        throw Error(ErrorCode::SchemaVersionMismatch, "unsupported report version in " + path);
    }
    RunReport report;
    report.label = doc.value("label", std::string{});
    report.mode = doc.value("mode", std::string{});
    report.k = doc.value("k", 0);
    report.model = doc.value("model", std::string{});
    report.query_count = doc.value("query_count", std::size_t{0});
    report.success_rate = doc.value("success_rate", 0.0);
    report.tool_accuracy = doc.value("tool_accuracy", 0.0);
    report.mean_wall_time_s = doc.value("mean_wall_time_s", 0.0);
    report.mean_recommender_time_s = doc.value("mean_recommender_time_s", 0.0);
    report.mean_prompt_tokens = doc.value("mean_prompt_tokens", 0.0);
    report.tokens_estimated = doc.value("tokens_estimated", false);
    report.partial = doc.value("partial", false);
    if (doc.contains("mean_power_w") && doc["mean_power_w"].is_number()) {
        report.mean_power_w = doc["mean_power_w"].get<double>();
    }
    if (doc.contains("power_gap_fraction") && doc["power_gap_fraction"].is_number()) {
        report.power_gap_fraction = doc["power_gap_fraction"].get<double>();
    }
    if (doc.contains("normalized_time") && doc["normalized_time"].is_number()) {
        report.normalized_time = doc["normalized_time"].get<double>();
    }
    if (doc.contains("normalized_power") && doc["normalized_power"].is_number()) {
        report.normalized_power = doc["normalized_power"].get<double>();
    }
    report.baseline_label = doc.value("baseline_label", std::string{});
    for (const auto& item : doc.value("records", nlohmann::json::array())) {
        report.records.push_back(record_from_json(item));
    }
    return report;
}

}  // namespace toolgate
