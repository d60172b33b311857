#pragma once

#include "vibroad/detectors.hpp"

#include <functional>
#include <string>
#include <vector>

namespace vibroad {

enum class ExplainMethod { Shapley, LocalDiffi };

struct RankingEntry {
    std::string feature;
    double weight = 0.0;
};

// Per-sample feature-importance ranking, sorted by weight descending with
// ties broken by feature declaration order.
struct ImportanceRanking {
    std::vector<RankingEntry> entries;
    ExplainMethod method = ExplainMethod::Shapley;
    double additivity_residual = 0.0; // Shapley only
    double elapsed_seconds = 0.0;
    bool degenerate = false;          // all weights zero
    bool inlier_flagged = false;      // explanation requested for a non-anomalous sample

    std::vector<std::string> feature_order() const;
    std::string to_json() const;
};

struct ShapleyConfig {
    int n_permutations = 128;
    enum class Background { TrainingSample, TrainingMeans } background = Background::TrainingSample;
    int background_rows = 50;
    std::uint64_t seed = 0;
};

using ScoreFn = std::function<double(const Eigen::RowVectorXd&)>;

// Shapley values of `score_fn` at `x`, estimated by permutation sampling
// with absent features drawn from the background rows. When n_permutations
// covers all p! orderings the estimate is exact. Weights are |phi|.
ImportanceRanking shapley_importance(const ScoreFn& score_fn,
                                     const std::vector<std::string>& feature_names,
                                     const Eigen::RowVectorXd& x,
                                     const Eigen::MatrixXd& background,
                                     const ShapleyConfig& config);

// Convenience wrapper: score function and background come from the detector.
ImportanceRanking shapley_importance(const FittedDetector& detector, const FeatureVector& x,
                                     const ShapleyConfig& config);

// Depth-based per-sample importance for the isolation forest: for each tree
// walk x's path, counting feature occurrences and accumulating
// 1/path_depth - 1/max_depth per occurrence; importance = accumulated / count.
ImportanceRanking local_diffi(const FittedDetector& detector, const FeatureVector& x);

// Normalized Kendall-Tau distance: discordant pairs / C(n,2), in [0,1].
double kendall_tau_distance(const ImportanceRanking& a, const ImportanceRanking& b);

} // namespace vibroad
