#include "vibroad/diagnosis.hpp"
#include "vibroad/errors.hpp"
#include "vibroad/evaluation.hpp"
#include "vibroad/model_io.hpp"
#include "vibroad/signal_io.hpp"
#include "vibroad/synth.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace vibroad;

namespace {

// Exit 2 is reserved for configuration and validation failures.
bool is_config_error(const Error& e) {
    static const char* codes[] = {"InvalidConfig", "InvalidSpec",  "InvalidContamination",
                                  "InvalidBand",   "NoInputs",     "WrongAlgorithm",
                                  "EmptyEnsemble", "NoSpecificFeatures"};
    return std::find(std::begin(codes), std::end(codes), e.code()) != std::end(codes);
}

void apply_thread_cap() {
    if (const char* env = std::getenv("VIBRO_AD_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            Eigen::setNbThreads(n);
    }
}

struct ThresholdFlags {
    double contamination = -1.0; // <0 means max-train rule
    double margin = 0.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--contamination", contamination,
                        "Quantile threshold rule with this training contamination in (0,1)");
        cmd->add_option("--margin", margin, "Relative margin for the max-train threshold rule");
    }
    ThresholdRule rule() const {
        return contamination >= 0.0 ? ThresholdRule::with_contamination(contamination)
                                    : ThresholdRule::max_train(margin);
    }
};

DetectorConfig load_config(const std::string& path, const std::string& algorithm,
                           std::uint64_t seed) {
    DetectorConfig cfg;
    if (!path.empty())
        cfg = DetectorConfig::from_json_file(path);
    if (!algorithm.empty())
        cfg.algorithm = algorithm_from_name(algorithm);
    cfg.seed = seed;
    return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << text;
}

int cmd_extract(const std::string& signals_dir, const std::string& spec_path,
                const std::string& out_path) {
    const auto spec = FeatureSpec::from_json_file(spec_path);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(signals_dir))
        if (entry.is_regular_file())
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw NoInputs("no signal files in " + signals_dir);

    FeatureTable table;
    table.columns = spec.names();
    table.data.resize(0, static_cast<Eigen::Index>(table.columns.size()));
    for (const auto& file : files)
        table.append_row(extract(read_signal(file), spec).values);
    table.write_csv(out_path);
    std::cout << "wrote " << table.rows() << " rows to " << out_path << "\n";
    return 0;
}

int cmd_fit(const DetectorConfig& cfg, const std::string& features_path,
            const std::string& out_path) {
    const auto table = FeatureTable::read_csv(features_path);
    const auto model = fit(cfg, table);
    save_model(*model, out_path);
    std::cout << "fitted " << algorithm_name(model->algorithm()) << " on " << table.rows()
              << " rows; model at " << out_path << "\n";
    return 0;
}

int cmd_score(const std::string& model_path, const std::string& features_path,
              const ThresholdFlags& thr, const std::string& out_path) {
    const auto model = load_model(model_path);
    const auto table = FeatureTable::read_csv(features_path);
    const auto rule = thr.rule();

    std::ostringstream csv;
    csv << "index,score,normalized_score,is_anomaly,threshold\n";
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto s = model->decide_with_rule(table.row(i), rule);
        csv << i << ',' << s.score << ',' << s.normalized_score << ',' << (s.is_anomaly ? 1 : 0)
            << ',' << s.threshold_used << '\n';
    }
    write_text(out_path, csv.str());
    std::cout << "scored " << table.rows() << " rows; results at " << out_path << "\n";
    return 0;
}

int cmd_diagnose(const std::string& model_path, const std::string& features_path,
                 const std::string& spec_path, const std::string& mode_name,
                 const std::string& explainer_name, const ThresholdFlags& thr, std::uint64_t seed,
                 const std::string& out_path) {
    const auto model = load_model(model_path);
    const auto table = FeatureTable::read_csv(features_path);
    const auto spec = FeatureSpec::from_json_file(spec_path);

    DiagnosisMode mode;
    if (mode_name == "classify")
        mode = DiagnosisMode::UnsupervisedClassification;
    else if (mode_name == "root_cause")
        mode = DiagnosisMode::RootCauseAnalysis;
    else
        throw InvalidConfig("mode must be classify or root_cause, got " + mode_name);

    ExplainMethod explainer;
    if (explainer_name == "shapley")
        explainer = ExplainMethod::Shapley;
    else if (explainer_name == "local_diffi")
        explainer = ExplainMethod::LocalDiffi;
    else
        throw InvalidConfig("explainer must be shapley or local_diffi, got " + explainer_name);

    ShapleyConfig shap;
    shap.seed = seed;

    std::ostringstream lines;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        auto report = diagnose(*model, table.row(i), spec, mode, explainer, thr.rule(), shap);
        report.sample_index = static_cast<int>(i);
        lines << report.to_json() << '\n';
    }
    write_text(out_path, lines.str());
    std::cout << "diagnosed " << table.rows() << " rows; reports at " << out_path << "\n";
    return 0;
}

int cmd_eval(const DetectorConfig& cfg, const std::string& features_path,
             const std::string& protocol, int iters, int init_n, double dropout,
             std::uint64_t seed, const std::string& out_dir) {
    const auto table = FeatureTable::read_csv(features_path);
    EvalRun run;
    if (protocol == "static")
        run = run_static_experiment(table, cfg, iters, seed);
    else if (protocol == "dynamic")
        run = run_dynamic_experiment(table, cfg, iters, seed, init_n, dropout);
    else
        throw InvalidConfig("protocol must be static or dynamic, got " + protocol);

    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "metrics.json", run.to_json());
    run.write_csv(fs::path(out_dir) / "iterations.csv");
    std::cout << "f1 " << run.f1_mean << " (" << run.f1_std << "), pr_auc " << run.pr_auc_mean
              << " (" << run.pr_auc_std << "); outputs in " << out_dir << "\n";
    return 0;
}

int cmd_synth(const std::string& case_name, DatasetParams params, const std::string& out_dir) {
    CaseStyle style;
    if (case_name == "bearing_runto_failure")
        style = CaseStyle::BearingRunToFailure;
    else if (case_name == "gearbox_static")
        style = CaseStyle::GearboxStatic;
    else if (case_name == "mechanical_static")
        style = CaseStyle::MechanicalStatic;
    else
        throw InvalidConfig("unknown case style: " + case_name);

    const auto dataset = generate_dataset(style, params);
    fs::create_directories(out_dir);
    dataset.table.write_csv(fs::path(out_dir) / "features.csv");
    write_text(fs::path(out_dir) / "feature_spec.json", dataset.spec.to_json());

    nlohmann::json truth;
    truth["seed"] = params.seed;
    truth["case"] = case_name;
    truth["onset_index"] = dataset.truth.onset_index;
    auto& faults = truth["row_faults"] = nlohmann::json::array();
    for (auto f : dataset.truth.row_faults)
        faults.push_back(fault_name(f));
    truth["row_severity"] = dataset.truth.row_severity;
    write_text(fs::path(out_dir) / "truth.json", truth.dump(2));
    std::cout << "generated " << dataset.table.rows() << " rows in " << out_dir << "\n";
    return 0;
}

int cmd_explain(const std::string& model_path, const std::string& features_path, int row,
                const std::string& method, std::uint64_t seed, const std::string& out_path) {
    const auto model = load_model(model_path);
    const auto table = FeatureTable::read_csv(features_path);
    if (row < 0 || static_cast<std::size_t>(row) >= table.rows())
        throw InvalidConfig("row index out of range");

    ImportanceRanking ranking;
    if (method == "shapley") {
        ShapleyConfig shap;
        shap.seed = seed;
        ranking = shapley_importance(*model, table.row(static_cast<std::size_t>(row)), shap);
    } else if (method == "local_diffi") {
        ranking = local_diffi(*model, table.row(static_cast<std::size_t>(row)));
    } else {
        throw InvalidConfig("method must be shapley or local_diffi, got " + method);
    }
    write_text(out_path, ranking.to_json());
    std::cout << "ranking at " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    apply_thread_cap();

    CLI::App app{"Unsupervised fault detection and diagnosis for rotating machinery"};
    app.require_subcommand(1);
    app.fallthrough(); // global --seed/--config/--out may follow the subcommand

    std::uint64_t seed = 0;
    std::string config_path, out_path;
    app.add_option("--seed", seed, "Seed for all stochastic stages")->capture_default_str();
    app.add_option("--config", config_path, "Detector configuration JSON");
    app.add_option("--out", out_path, "Output file or directory");

    std::string algorithm_flag;

    auto* extract_cmd = app.add_subcommand("extract", "Extract features from a signal directory");
    std::string signals_dir, spec_path;
    extract_cmd->add_option("--signals", signals_dir, "Directory of signal files")->required();
    extract_cmd->add_option("--spec", spec_path, "Feature spec JSON")->required();

    auto* fit_cmd = app.add_subcommand("fit", "Fit a detector on a feature table");
    std::string features_path;
    fit_cmd->add_option("--features", features_path, "Feature table CSV")->required();
    fit_cmd->add_option("--algorithm", algorithm_flag, "Detector algorithm name");

    auto* score_cmd = app.add_subcommand("score", "Score a feature table with a saved model");
    std::string model_path;
    score_cmd->add_option("--model", model_path, "Model file")->required();
    score_cmd->add_option("--features", features_path, "Feature table CSV")->required();
    ThresholdFlags score_thr;
    score_thr.attach(score_cmd);

    auto* diag_cmd = app.add_subcommand("diagnose", "Detect and explain anomalies");
    std::string mode_name = "root_cause", explainer_name = "local_diffi";
    diag_cmd->add_option("--model", model_path, "Model file")->required();
    diag_cmd->add_option("--features", features_path, "Feature table CSV")->required();
    diag_cmd->add_option("--spec", spec_path, "Feature spec JSON")->required();
    diag_cmd->add_option("--mode", mode_name, "classify | root_cause")->capture_default_str();
    diag_cmd->add_option("--explainer", explainer_name, "shapley | local_diffi")
        ->capture_default_str();
    ThresholdFlags diag_thr;
    diag_thr.attach(diag_cmd);

    auto* eval_cmd = app.add_subcommand("eval", "Run a repeated evaluation protocol");
    std::string protocol = "static";
    int iters = 10, init_n = 100;
    double dropout = 0.05;
    eval_cmd->add_option("--features", features_path, "Labeled feature table CSV")->required();
    eval_cmd->add_option("--algorithm", algorithm_flag, "Detector algorithm name");
    eval_cmd->add_option("--protocol", protocol, "static | dynamic")->capture_default_str();
    eval_cmd->add_option("--iters", iters, "Iterations / repeats")->capture_default_str();
    eval_cmd->add_option("--init-n", init_n, "Warm-up rows (dynamic)")->capture_default_str();
    eval_cmd->add_option("--dropout", dropout, "Training dropout per refit (dynamic)")
        ->capture_default_str();

    auto* synth_cmd = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
    std::string case_name = "bearing_runto_failure";
    DatasetParams params;
    synth_cmd->add_option("--case", case_name, "bearing_runto_failure | gearbox_static | mechanical_static")
        ->capture_default_str();
    synth_cmd->add_option("--rows", params.n_rows, "Row count")->capture_default_str();
    synth_cmd->add_option("--onset", params.onset_index, "Fault onset row (run-to-failure)")
        ->capture_default_str();
    synth_cmd->add_option("--severity", params.max_severity, "Peak fault severity")
        ->capture_default_str();
    synth_cmd->add_option("--noise", params.noise_rms, "Noise RMS")->capture_default_str();

    auto* explain_cmd = app.add_subcommand("explain", "Feature importance for one sample");
    int row = 0;
    std::string method = "local_diffi";
    explain_cmd->add_option("--model", model_path, "Model file")->required();
    explain_cmd->add_option("--features", features_path, "Feature table CSV")->required();
    explain_cmd->add_option("--row", row, "Row index")->capture_default_str();
    explain_cmd->add_option("--method", method, "shapley | local_diffi")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (out_path.empty())
            throw InvalidConfig("--out is required");
        if (extract_cmd->parsed())
            return cmd_extract(signals_dir, spec_path, out_path);
        if (fit_cmd->parsed())
            return cmd_fit(load_config(config_path, algorithm_flag, seed), features_path, out_path);
        if (score_cmd->parsed())
            return cmd_score(model_path, features_path, score_thr, out_path);
        if (diag_cmd->parsed())
            return cmd_diagnose(model_path, features_path, spec_path, mode_name, explainer_name,
                                diag_thr, seed, out_path);
        if (eval_cmd->parsed())
            return cmd_eval(load_config(config_path, algorithm_flag, seed), features_path, protocol,
                            iters, init_n, dropout, seed, out_path);
        if (synth_cmd->parsed()) {
            params.seed = seed;
            return cmd_synth(case_name, params, out_path);
        }
        if (explain_cmd->parsed())
            return cmd_explain(model_path, features_path, row, method, seed, out_path);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n"; // what() starts with the stable code
        return is_config_error(e) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "RuntimeError: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
