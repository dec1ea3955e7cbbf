#pragma once

#include <optional>
#include <string>
#include <vector>

#include "toolgate/controller.hpp"

namespace toolgate {

struct GoldCall {
    std::string tool_name;
    nlohmann::json arguments = nlohmann::json::object();

    bool operator==(const GoldCall& other) const = default;
};

struct BenchQuery {
    std::string id;
    std::string text;
    std::string category;
    std::vector<GoldCall> gold_calls;
    bool sequential = false;  // chained calls judged order-sensitively
};

struct EvalRecord {
    std::string query_id;
    ControllerDecision decision;
    std::vector<PredictedCall> predicted_calls;
    bool tool_correct = false;
    bool success = false;  // success implies tool_correct
    double wall_time_s = 0.0;
    double recommender_time_s = 0.0;
    long prompt_tokens = 0;
    bool tokens_estimated = false;
    double start_unix_s = 0.0;
    double end_unix_s = 0.0;
    std::optional<double> energy_j;
};

struct RunReport {
    std::string label;
    std::string mode;  // "lis" | "all-tools"
    int k = 0;
    std::string model;
    std::size_t query_count = 0;
    double success_rate = 0.0;
    double tool_accuracy = 0.0;
    double mean_wall_time_s = 0.0;
    double mean_recommender_time_s = 0.0;
    double mean_prompt_tokens = 0.0;
    bool tokens_estimated = false;
    std::optional<double> mean_power_w;
    std::optional<double> power_gap_fraction;  // set when a power log was ingested
    std::optional<double> normalized_time;     // vs baseline, same query set
    std::optional<double> normalized_power;
    std::string baseline_label;
    bool partial = false;  // a fatal error aborted the run early
    std::vector<EvalRecord> records;
};

/// JSONL of BenchQuery lines. Gold tool names must resolve against the tool
/// set (UnknownGoldTool lists the offenders). Throws SchemaError with the
/// line number on malformed records.
std::vector<BenchQuery> load_benchmark(const std::string& path,
                                       const std::vector<ToolSpec>& tools);

/// Multiset equality of predicted vs gold tool names; order-sensitive when
/// sequential is set.
bool judge_tool_accuracy(const std::vector<PredictedCall>& predicted,
                         const std::vector<GoldCall>& gold, bool sequential);

/// Tool accuracy plus argument checking: every gold argument key present
/// with a type-compatible value (numeric strings pass for numbers); extra
/// predicted arguments are permitted.
bool judge_success(const std::vector<PredictedCall>& predicted,
                   const std::vector<GoldCall>& gold, bool sequential);

struct EvaluateOptions {
    RunMode mode = RunMode::lis;
    int k = 5;
    double floor = 0.5;
    std::string model;
    std::string recommender_template;
    std::optional<std::string> power_log_path;
};

/// Runs every query once through run_query and aggregates the metrics.
/// Fatal transport errors abort the remaining queries and mark the report
/// partial.
RunReport evaluate(const std::vector<BenchQuery>& bench, const std::vector<ToolSpec>& tools,
                   const Level1Index& l1, const Level2Index& l2, LlmClient& llm,
                   const Embedder& embedder, const EvaluateOptions& options);

struct PowerSample {
    double timestamp_s = 0.0;
    double power_w = 0.0;
};

/// CSV of (unix_timestamp_s, power_w) with strictly increasing timestamps.
std::vector<PowerSample> load_power_log(const std::string& path);

/// Trapezoidal energy integral over each record's [start, end] window;
/// records outside log coverage keep energy_j absent. Returns the gap
/// fraction.
double ingest_power_log(const std::vector<PowerSample>& samples,
                        std::vector<EvalRecord>& records);

/// Recomputes the power aggregates of a report from its records.
void refresh_power_metrics(RunReport& report);

/// normalized_time = mean_wall_time / baseline's; same for power when both
/// sides have it. Throws QuerySetMismatch / MissingBaselineMetric.
RunReport normalize_report(const RunReport& report, const RunReport& baseline);

enum class ReportFormat { json, csv };

void report_emit(const RunReport& report, ReportFormat format, const std::string& path);
RunReport report_load_json(const std::string& path);

constexpr int kReportSchemaVersion = 1;

}  // namespace toolgate
