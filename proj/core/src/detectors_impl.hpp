#pragma once

// Internal: concrete detector classes shared by the detector source files.

#include "vibroad/detectors.hpp"

#include <Eigen/Dense>

namespace vibroad::impl {

// Model-space training matrix plus the common fitted-state bookkeeping.
// Standardization is applied for every algorithm except the axis-aligned,
// per-feature ones (isolation forest and HBOS).
Eigen::MatrixXd init_base(FittedDetector& det, const DetectorConfig& config,
                          const FeatureTable& train, bool standardize_inputs);

void set_train_scores(FittedDetector& det, std::vector<double> scores);

// Sorted distances from x to every row of data; optionally skips one row.
std::vector<double> sorted_distances(const Eigen::MatrixXd& data, const Eigen::RowVectorXd& x,
                                     int skip_row = -1);
// Indices of the k nearest rows (ascending distance, ties by row index).
std::vector<int> knn_indices(const Eigen::MatrixXd& data, const Eigen::RowVectorXd& x, int k,
                             int skip_row = -1);

class KnnDetector final : public FittedDetector {
public:
    KnnDetector(const DetectorConfig& config, const FeatureTable& train);

protected:
    double score_impl(const Eigen::RowVectorXd& x) const override;

private:
    double score_general(const Eigen::RowVectorXd& x, int skip_row) const;
    Eigen::MatrixXd data_;
};

class LofDetector final : public FittedDetector {
public:
    LofDetector(const DetectorConfig& config, const FeatureTable& train);
    // Shared with feature bagging (which builds LOF members on sub-spaces).
    static double lof_score(const Eigen::MatrixXd& train, const Eigen::RowVectorXd& x, int k,
                            int skip_row = -1);

protected:
    double score_impl(const Eigen::RowVectorXd& x) const override;

private:
    Eigen::MatrixXd data_;
};

class McdDetector final : public FittedDetector {
public:
    McdDetector(const DetectorConfig& config, const FeatureTable& train);

    const Eigen::RowVectorXd& robust_location() const { return location_; }
    const Eigen::MatrixXd& robust_covariance() const { return covariance_; }

protected:
    double score_impl(const Eigen::RowVectorXd& x) const override;

private:
    Eigen::RowVectorXd location_;
    Eigen::MatrixXd covariance_;
    Eigen::MatrixXd cov_inverse_;
};

class CblofDetector final : public FittedDetector {
public:
    CblofDetector(const DetectorConfig& config, const FeatureTable& train);

    const Eigen::MatrixXd& centroids() const { return centroids_; }
    const std::vector<int>& cluster_sizes() const { return sizes_; }
    const std::vector<bool>& is_large() const { return large_; }

protected:
    double score_impl(const Eigen::RowVectorXd& x) const override;

private:
    Eigen::MatrixXd centroids_;
    std::vector<int> sizes_;
    std::vector<bool> large_;
};

class OcsvmDetector final : public FittedDetector {
public:
    OcsvmDetector(const DetectorConfig& config, const FeatureTable& train);

    double rho() const { return rho_; }
    const Eigen::VectorXd& alphas() const { return alpha_; }

protected:
    double score_impl(const Eigen::RowVectorXd& x) const override;

private:
    Eigen::MatrixXd data_;
    Eigen::VectorXd alpha_;
    double rho_ = 0.0;
};

class FeatureBaggingDetector final : public FittedDetector {
public:
    FeatureBaggingDetector(const DetectorConfig& config, const FeatureTable& train);

protected:
    double score_impl(const Eigen::RowVectorXd& x) const override;

private:
    Eigen::MatrixXd data_;
    std::vector<std::vector<int>> feature_subsets_;
};

class FastAbodDetector final : public FittedDetector {
public:
    FastAbodDetector(const DetectorConfig& config, const FeatureTable& train);
    // Negated weighted angle variance over all neighbor pairs.
    static double abof_score(const Eigen::MatrixXd& train, const Eigen::RowVectorXd& x, int k,
                             int skip_row = -1);

protected:
    double score_impl(const Eigen::RowVectorXd& x) const override;

private:
    Eigen::MatrixXd data_;
};

class HbosDetector final : public FittedDetector {
public:
    HbosDetector(const DetectorConfig& config, const FeatureTable& train);

protected:
    double score_impl(const Eigen::RowVectorXd& x) const override;

private:
    struct Histogram {
        double lo = 0.0;
        double hi = 0.0;
        std::vector<double> heights; // normalized so the tallest bin is 1
    };
    std::vector<Histogram> histograms_;
};

class LodaDetector final : public FittedDetector {
public:
    LodaDetector(const DetectorConfig& config, const FeatureTable& train);

protected:
    double score_impl(const Eigen::RowVectorXd& x) const override;

private:
    struct Projection {
        Eigen::VectorXd w;
        double lo = 0.0;
        double hi = 0.0;
        std::vector<double> probs; // relative frequency per bin
    };
    std::vector<Projection> projections_;
};

class EnsembleDetector final : public FittedDetector {
public:
    EnsembleDetector(const DetectorConfig& config, const FeatureTable& train);

    const std::vector<std::unique_ptr<FittedDetector>>& members() const { return members_; }
    ScoredSample decide_with_rule(const FeatureVector& x, const ThresholdRule& rule) const override;

protected:
    double score_impl(const Eigen::RowVectorXd& x) const override;

private:
    double normalized_member_mean(const Eigen::RowVectorXd& x_raw) const;
    std::vector<std::unique_ptr<FittedDetector>> members_;
};

} // namespace vibroad::impl
