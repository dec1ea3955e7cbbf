// toolgate: offline index building, corpus augmentation, and benchmark runs
// for dynamic tool selection in front of a function-calling LLM.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "toolgate/augment.hpp"
#include "toolgate/bench.hpp"
#include "toolgate/controller.hpp"
#include "toolgate/index.hpp"
#include "toolgate/recommender.hpp"

using namespace toolgate;

namespace {

struct EmbedderFlags {
    std::string kind = "deterministic";
    std::size_t dim = kDefaultDim;
    std::string endpoint;
    std::string model;

    EmbedderConfig to_config() const {
        EmbedderConfig config;
        if (kind == "deterministic") {
            config.kind = EmbedderKind::deterministic_test;
        } else if (kind == "remote") {
            config.kind = EmbedderKind::remote_http;
        } else {
            throw Error(ErrorCode::InvalidArgument,
                        "--embedder must be 'deterministic' or 'remote'");
        }
        config.dim = dim;
        config.endpoint = endpoint;
        config.model_name = model;
        return config;
    }
};

void add_embedder_flags(CLI::App* cmd, EmbedderFlags& flags) {
    cmd->add_option("--embedder", flags.kind, "deterministic | remote")
        ->capture_default_str();
    cmd->add_option("--dim", flags.dim, "embedding dimension")->capture_default_str();
    cmd->add_option("--embed-endpoint", flags.endpoint,
                    "remote embedding endpoint (or TOOLGATE_EMBED_ENDPOINT)");
    cmd->add_option("--embed-model", flags.model, "embedding model name");
}

// Flags beat the [llm] config-file section, which beats built-in defaults.
struct LlmFlags {
    CLI::App* cmd = nullptr;
    std::string config_path;
    std::string endpoint;
    std::string dialect = "openai";
    std::string model;
    double timeout_s = 120.0;

    LlmConfig to_config() const {
        LlmConfig config;
        if (!config_path.empty()) {
            config = apply_llm_section(read_config_section(config_path, "llm"), config);
        }
        if (cmd->count("--llm-endpoint") > 0) config.endpoint = endpoint;
        if (cmd->count("--dialect") > 0) config.dialect = dialect_from_name(dialect);
        if (cmd->count("--model") > 0) config.model = model;
        if (cmd->count("--timeout") > 0) config.timeout_s = timeout_s;
        return config;
    }

    bool endpoint_available() const {
        return !to_config().endpoint.empty() ||
               std::getenv("TOOLGATE_LLM_ENDPOINT") != nullptr;
    }
};

void add_llm_flags(CLI::App* cmd, LlmFlags& flags) {
    flags.cmd = cmd;
    cmd->add_option("--config", flags.config_path,
                    "config file with an [llm] section (endpoint, dialect, model, timeout_s)");
    cmd->add_option("--llm-endpoint", flags.endpoint,
                    "chat endpoint URL (or TOOLGATE_LLM_ENDPOINT)");
    cmd->add_option("--dialect", flags.dialect, "openai | ollama")->capture_default_str();
    cmd->add_option("--model", flags.model, "model name sent with each request");
    cmd->add_option("--timeout", flags.timeout_s, "request timeout in seconds")
        ->capture_default_str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open " + path);
    }
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

int run_build_index(const std::string& tools_path, const std::string& corpus_path,
                    double threshold, const std::string& out_dir,
                    const EmbedderFlags& embedder_flags) {
    auto tools = load_tools_json(tools_path);
    auto embedder = make_embedder(embedder_flags.to_config());
    std::filesystem::create_directories(out_dir);

    auto l1 = build_level1(tools, *embedder);
    auto l1_path = (std::filesystem::path(out_dir) / "index.l1.json").string();
    save_index(l1, l1_path);
    std::cout << "wrote " << l1_path << " (" << l1.entries.size() << " tools)\n";

    if (corpus_path.empty()) {
        std::cout << "no corpus given; skipped the level-2 index\n";
        return 0;
    }
    auto corpus = load_corpus_jsonl(corpus_path);
    auto l2 = build_level2(corpus, tools, *embedder, threshold);
    auto l2_path = (std::filesystem::path(out_dir) / "index.l2.json").string();
    save_index(l2, l2_path);
    std::cout << "wrote " << l2_path << " (" << l2.clusters.size() << " clusters over "
              << corpus.size() << " queries)\n";
    return 0;
}

int run_augment(const std::string& train_path, const std::string& tools_path,
                const std::string& out_path, AugmentationConfig config,
                const LlmFlags& llm_flags) {
    auto tools = load_tools_json(tools_path);
    auto training = load_corpus_jsonl(train_path);
    auto seeds = sample_seeds(training, config);

    std::set<std::string> known;
    for (const auto& tool : tools) known.insert(tool.id);

    std::vector<AugmentedQuery> variants;
    if (llm_flags.endpoint_available()) {
        LlmConfig llm_config = llm_flags.to_config();
        config.model = llm_config.model;
        HttpLlmClient llm(llm_config);
        for (const auto& sample : seeds) {
            for (const auto& seed : sample.queries) {
                auto kept = generate_variants(seed, llm, config, known);
                variants.insert(variants.end(), kept.begin(), kept.end());
            }
        }
    } else {
        std::cout << "no LLM endpoint; emitting seeds only\n";
    }

    auto corpus = assemble_corpus(seeds, variants);
    for (const auto& query : corpus) {
        for (const auto& tool : query.gold_tools) {
            if (!known.count(tool)) {
                throw Error(ErrorCode::UnknownToolId,
                            "query '" + query.id + "' references unknown tool '" + tool + "'");
            }
        }
    }
    save_corpus_jsonl(corpus, out_path);
    std::cout << "wrote " << out_path << " (" << corpus.size() << " queries, "
              << variants.size() << " kept variants)\n";
    return 0;
}

int run_bench(const std::string& tools_path, const std::string& l1_path,
              const std::string& l2_path, const std::string& bench_path, int k, double floor,
              const std::string& mode, const std::string& report_path,
              const std::string& csv_path, const std::string& power_log,
              const std::string& prompt_file, const EmbedderFlags& embedder_flags,
              const LlmFlags& llm_flags) {
    auto tools = load_tools_json(tools_path);
    auto l1 = load_level1(l1_path);
    auto l2 = load_level2(l2_path);
    auto bench = load_benchmark(bench_path, tools);
    auto embedder = make_embedder(embedder_flags.to_config());

    if (!llm_flags.endpoint_available()) {
        throw Error(ErrorCode::InvalidArgument,
                    "run needs --llm-endpoint or TOOLGATE_LLM_ENDPOINT");
    }
    LlmConfig llm_config = llm_flags.to_config();
    HttpLlmClient llm(llm_config);

    EvaluateOptions options;
    if (mode == "lis") {
        options.mode = RunMode::lis;
    } else if (mode == "all-tools") {
        options.mode = RunMode::all_tools;
    } else {
        throw Error(ErrorCode::InvalidArgument, "--mode must be 'lis' or 'all-tools'");
    }
    options.k = k;
    options.floor = floor;
    options.model = llm_config.model;
    if (!power_log.empty()) options.power_log_path = power_log;
    if (!prompt_file.empty()) options.recommender_template = read_file(prompt_file);

    auto report = evaluate(bench, tools, l1, l2, llm, *embedder, options);
    report_emit(report, ReportFormat::json, report_path);
    std::cout << "wrote " << report_path << '\n';
    if (!csv_path.empty()) {
        report_emit(report, ReportFormat::csv, csv_path);
        std::cout << "wrote " << csv_path << '\n';
    }
    std::cout << "mode=" << report.mode << " k=" << report.k
              << " success_rate=" << report.success_rate
              << " tool_accuracy=" << report.tool_accuracy
              << " mean_wall_time_s=" << report.mean_wall_time_s
              << " mean_prompt_tokens=" << report.mean_prompt_tokens << '\n';
    if (report.partial) {
        std::cerr << "run aborted early by a fatal error; report is partial\n";
        return 1;
    }
    return 0;
}

int run_compare(const std::string& run_path, const std::string& baseline_path,
                const std::string& out_path) {
    auto run = report_load_json(run_path);
    auto baseline = report_load_json(baseline_path);
    auto normalized = normalize_report(run, baseline);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot open " + out_path + " for writing");
    }
    out << "metric,run,baseline,ratio\n";
    auto row = [&](const char* name, double value, double base) {
        out << name << ',' << value << ',' << base << ',';
        if (base != 0.0) out << value / base;
        out << '\n';
    };
    row("success_rate", run.success_rate, baseline.success_rate);
    row("tool_accuracy", run.tool_accuracy, baseline.tool_accuracy);
    row("mean_wall_time_s", run.mean_wall_time_s, baseline.mean_wall_time_s);
    row("mean_prompt_tokens", run.mean_prompt_tokens, baseline.mean_prompt_tokens);
    if (run.mean_power_w && baseline.mean_power_w) {
        row("mean_power_w", *run.mean_power_w, *baseline.mean_power_w);
    }
    out << "normalized_time," << *normalized.normalized_time << ",1,"
        << *normalized.normalized_time << '\n';
    if (normalized.normalized_power) {
        out << "normalized_power," << *normalized.normalized_power << ",1,"
            << *normalized.normalized_power << '\n';
    }
    std::cout << "wrote " << out_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Less-is-More tool selection: index building and benchmark harness"};
    app.require_subcommand(1);

    // build-index
    auto* build = app.add_subcommand("build-index", "embed tools and cluster the corpus");
    std::string tools_path, corpus_path, out_dir = ".";
    double threshold = 0.5;
    EmbedderFlags build_embedder;
    build->add_option("--tools", tools_path, "tools JSON file")->required();
    build->add_option("--corpus", corpus_path, "augmented corpus JSONL (enables level 2)");
    build->add_option("--threshold", threshold, "cosine-distance merge threshold")
        ->capture_default_str();
    build->add_option("--out", out_dir, "output directory")->capture_default_str();
    add_embedder_flags(build, build_embedder);

    // augment
    auto* augment = app.add_subcommand("augment", "sample seeds and generate query variants");
    std::string train_path, augment_tools, augment_out;
    AugmentationConfig augment_config;
    LlmFlags augment_llm;
    augment->add_option("--train", train_path, "training queries JSONL")->required();
    augment->add_option("--tools", augment_tools, "tools JSON file")->required();
    augment->add_option("--out", augment_out, "output corpus JSONL")->required();
    augment->add_option("--seed", augment_config.rng_seed, "sampling RNG seed")
        ->capture_default_str();
    augment->add_option("--cap", augment_config.per_category_sample, "seeds per category")
        ->capture_default_str();
    augment->add_option("--variants", augment_config.variants_per_seed, "variants per seed")
        ->capture_default_str();
    augment->add_option("--rouge-min", augment_config.rouge_min, "ROUGE lower bound")
        ->capture_default_str();
    augment->add_option("--rouge-max", augment_config.rouge_max, "ROUGE upper bound")
        ->capture_default_str();
    add_llm_flags(augment, augment_llm);

    // run
    auto* run = app.add_subcommand("run", "drive a benchmark against an LLM endpoint");
    std::string run_tools, l1_path, l2_path, bench_path, report_path = "report.json";
    std::string csv_path, power_log, prompt_file, mode = "lis";
    int k = 5;
    double floor = 0.5;
    EmbedderFlags run_embedder;
    LlmFlags run_llm;
    run->add_option("--tools", run_tools, "tools JSON file")->required();
    run->add_option("--l1", l1_path, "level-1 index file")->required();
    run->add_option("--l2", l2_path, "level-2 index file")->required();
    run->add_option("--bench", bench_path, "benchmark JSONL")->required();
    run->add_option("--k", k, "top-k for the similarity search")->capture_default_str();
    run->add_option("--floor", floor, "confidence floor for level arbitration")
        ->capture_default_str();
    run->add_option("--mode", mode, "lis | all-tools")->capture_default_str();
    run->add_option("--report", report_path, "output report JSON")->capture_default_str();
    run->add_option("--csv", csv_path, "also emit per-query CSV");
    run->add_option("--power-log", power_log, "power samples CSV (unix_ts,power_w)");
    run->add_option("--recommender-prompt", prompt_file,
                    "override the recommender prompt template");
    add_embedder_flags(run, run_embedder);
    add_llm_flags(run, run_llm);

    // report
    auto* compare = app.add_subcommand("report", "normalize a run against a baseline");
    std::string cmp_run, cmp_baseline, cmp_out = "cmp.csv";
    compare->add_option("--run", cmp_run, "run report JSON")->required();
    compare->add_option("--baseline", cmp_baseline, "baseline report JSON")->required();
    compare->add_option("--out", cmp_out, "comparison CSV")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            return run_build_index(tools_path, corpus_path, threshold, out_dir, build_embedder);
        }
        if (augment->parsed()) {
            return run_augment(train_path, augment_tools, augment_out, augment_config,
                               augment_llm);
        }
        if (run->parsed()) {
            return run_bench(run_tools, l1_path, l2_path, bench_path, k, floor, mode,
                             report_path, csv_path, power_log, prompt_file, run_embedder,
                             run_llm);
        }
        if (compare->parsed()) {
            return run_compare(cmp_run, cmp_baseline, cmp_out);
        }
    } catch (const Error& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
    return 0;
}
