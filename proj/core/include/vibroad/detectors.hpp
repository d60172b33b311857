#pragma once

#include "vibroad/features.hpp"
#include "vibroad/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vibroad {

enum class Algorithm {
    Knn,
    Mcd,
    Lof,
    Cblof,
    Ocsvm,
    FeatureBagging,
    FastAbod,
    IsolationForest,
    Hbos,
    Loda,
    Ensemble,
};

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

enum class KnnMethod { Largest, Mean, Median };
enum class Combination { Average, Max };

// Per-algorithm hyperparameters. Defaults match the reference tuning used
// throughout: see the per-field initializers.
struct DetectorConfig {
    Algorithm algorithm = Algorithm::IsolationForest;
    std::uint64_t seed = 0;
    // Z-score inputs on fit for the scale-sensitive algorithms. IF and HBOS
    // are axis-aligned and never scale.
    bool standardize = true;

    int knn_k = 5;
    KnnMethod knn_method = KnnMethod::Largest;

    bool mcd_assume_centered = false;

    int lof_k = 16;

    int cblof_n_clusters = 6;
    double cblof_alpha = 0.8;
    double cblof_beta = 4.0;

    double ocsvm_gamma = 0.2;
    double ocsvm_nu = 0.7;

    int fb_n_estimators = 10;
    double fb_max_features = 1.0;
    Combination fb_combination = Combination::Average;

    int abod_k = 5;

    int if_n_estimators = 100;
    int if_max_samples = 128;

    int hbos_n_bins = 5;
    double hbos_alpha = 0.1;
    double hbos_tol = 0.5;

    int loda_n_bins = 5;
    int loda_n_random_cuts = 50;

    // Empty means all ten base algorithms.
    std::vector<Algorithm> ensemble_members;

    static DetectorConfig from_json(const std::string& text);
    static DetectorConfig from_json_file(const std::filesystem::path& path);
    std::string to_json() const;
};

struct ThresholdRule {
    enum class Kind { MaxTrain, Contamination };
    Kind kind = Kind::MaxTrain;
    double contamination = 0.1; // valid in (0,1)
    double margin = 0.0;        // relative margin above max train score

    static ThresholdRule max_train(double margin = 0.0) {
        return {Kind::MaxTrain, 0.1, margin};
    }
    static ThresholdRule with_contamination(double c) {
        return {Kind::Contamination, c, 0.0};
    }
};

struct ScoredSample {
    double score = 0.0;
    double normalized_score = 0.0; // min-max over training scores, clamped to [0,1]
    bool is_anomaly = false;       // score > threshold_used, strict
    double threshold_used = 0.0;
    bool warmup = false;           // scored retrospectively from the initial window
};

class FittedDetector;

namespace impl {
// Fitting plumbing shared by the concrete detectors; defined out of line.
Eigen::MatrixXd init_base(FittedDetector& det, const DetectorConfig& config,
                          const FeatureTable& train, bool standardize_inputs);
void set_train_scores(FittedDetector& det, std::vector<double> scores);
} // namespace impl

// Immutable trained state of one detector. Larger score = more anomalous for
// every algorithm. Scaling, when the algorithm needs it, is fitted on the
// training table and applied transparently to queries.
class FittedDetector {
public:
    virtual ~FittedDetector() = default;

    Algorithm algorithm() const { return config_.algorithm; }
    const DetectorConfig& config() const { return config_; }
    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<double>& train_scores() const { return train_scores_; }
    const FeatureTable& train_table() const { return train_raw_; }
    const std::optional<ScalingParams>& scaling() const { return scaling_; }

    // Score a point given in raw (unscaled) feature space.
    double score_point(const Eigen::RowVectorXd& x) const;
    double score(const FeatureVector& x) const;

    double threshold(const ThresholdRule& rule) const;
    ScoredSample decide(const FeatureVector& x, double thr) const;
    virtual ScoredSample decide_with_rule(const FeatureVector& x, const ThresholdRule& rule) const;

protected:
    virtual double score_impl(const Eigen::RowVectorXd& x_model_space) const = 0;

    DetectorConfig config_;
    std::vector<std::string> columns_;
    FeatureTable train_raw_;
    std::optional<ScalingParams> scaling_;
    std::vector<double> train_scores_;

    friend std::unique_ptr<FittedDetector> fit(const DetectorConfig&, const FeatureTable&);
    friend Eigen::MatrixXd impl::init_base(FittedDetector&, const DetectorConfig&,
                                           const FeatureTable&, bool);
    friend void impl::set_train_scores(FittedDetector&, std::vector<double>);
};

// Deterministic given (config, train, seed).
std::unique_ptr<FittedDetector> fit(const DetectorConfig& config, const FeatureTable& train);

// Majority vote: anomalous iff more than half the members say so.
bool ensemble_decide(const std::vector<bool>& decisions);

struct SlidingWindowOptions {
    int refit_every = 1;     // refit cadence, in accepted samples
    double dropout = 0.0;    // fraction of training rows randomly dropped per refit
    std::uint64_t dropout_seed = 0;
};

struct SlidingWindowResult {
    std::vector<ScoredSample> samples;   // one per stream row, warm-up rows flagged
    FeatureTable final_training;
};

// First init_n rows form the initial training set; each later row is scored
// against the current model and, when decided normal, appended to the
// training set.
SlidingWindowResult sliding_window_run(const FeatureTable& stream, const DetectorConfig& config,
                                       int init_n, const ThresholdRule& rule,
                                       const SlidingWindowOptions& options = {});

namespace detail {
// Linear-interpolation quantile of an unsorted sample, q in [0,1].
double quantile(std::vector<double> values, double q);
// Eq.-style score combination for feature bagging.
double combine_scores(const std::vector<double>& scores, Combination combination);
// Average negative log-probability across projections.
double loda_score_from_probs(const std::vector<double>& probs);
// Average unsuccessful-search path length in a BST of n points.
double average_path_length(std::size_t n);
} // namespace detail

} // namespace vibroad
