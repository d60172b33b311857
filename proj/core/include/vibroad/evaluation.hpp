#pragma once

#include "vibroad/detectors.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace vibroad {

struct ConfusionMatrix {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long tn = 0;
};

// Anomaly is the positive class.
ConfusionMatrix confusion_matrix(const std::vector<bool>& pred, const std::vector<bool>& truth);

// 2TP / (2TP + FP + FN); 0 with `degenerate` set when the denominator is 0.
double f1_score(const ConfusionMatrix& cm, bool* degenerate = nullptr);

// Average-precision form of the PR curve area, ties grouped.
double pr_auc(const std::vector<double>& scores, const std::vector<bool>& truth);

struct IterationMetrics {
    double f1 = 0.0;
    double pr_auc = 0.0;
    ConfusionMatrix cm;
    bool degenerate = false;
};

struct EvalRun {
    std::vector<IterationMetrics> iterations;
    double f1_mean = 0.0, f1_std = 0.0;
    double pr_auc_mean = 0.0, pr_auc_std = 0.0;
    ConfusionMatrix cm_mean; // element-wise rounded mean

    void aggregate();
    std::string to_json() const;
    void write_csv(const std::filesystem::path& path) const; // one row per iteration
};

// Repeated static splits: per iteration the training group is 80% of the
// normal rows plus anomalies making up 20% of the training group; the
// threshold uses the (known) training contamination; the remainder is scored.
EvalRun run_static_experiment(const FeatureTable& labeled, const DetectorConfig& config, int iters,
                              std::uint64_t seed, double normal_frac = 0.8,
                              double anomaly_frac = 0.2);

// Repeated sliding-window runs with per-refit random exclusion of training
// rows. Warm-up rows are excluded from the metrics.
EvalRun run_dynamic_experiment(const FeatureTable& stream, const DetectorConfig& config,
                               int repeats, std::uint64_t seed, int init_n = 100,
                               double dropout = 0.05,
                               const ThresholdRule& rule = ThresholdRule::max_train());

} // namespace vibroad
