#include "detectors_impl.hpp"

#include "vibroad/errors.hpp"

#include <algorithm>
#include <cmath>

namespace vibroad::impl {

// ---------------------------------------------------------------- kNN

KnnDetector::KnnDetector(const DetectorConfig& config, const FeatureTable& train) {
    if (config.knn_k < 1)
        throw InvalidConfig("kNN needs k >= 1");
    if (static_cast<int>(train.rows()) <= config.knn_k)
        throw InsufficientData("kNN needs more training rows than k");
    data_ = init_base(*this, config, train, /*standardize=*/true);

    std::vector<double> scores;
    scores.reserve(train.rows());
    for (Eigen::Index i = 0; i < data_.rows(); ++i)
        scores.push_back(score_general(data_.row(i), static_cast<int>(i)));
    set_train_scores(*this, std::move(scores));
}

double KnnDetector::score_general(const Eigen::RowVectorXd& x, int skip_row) const {
    const auto dist = sorted_distances(data_, x, skip_row);
    const auto k = static_cast<std::size_t>(config_.knn_k);
    switch (config_.knn_method) {
        case KnnMethod::Largest:
            return dist[k - 1];
        case KnnMethod::Mean: {
            double acc = 0.0;
            for (std::size_t i = 0; i < k; ++i) acc += dist[i];
            return acc / static_cast<double>(k);
        }
        case KnnMethod::Median: {
            if (k % 2 == 1) return dist[k / 2];
            return 0.5 * (dist[k / 2 - 1] + dist[k / 2]);
        }
    }
    return dist[k - 1];
}

double KnnDetector::score_impl(const Eigen::RowVectorXd& x) const {
    return score_general(x, -1);
}

// ---------------------------------------------------------------- LOF

namespace {

struct LofModel {
    std::vector<std::vector<int>> neighbors; // per training row, self excluded
    std::vector<double> k_distance;
    std::vector<double> lrd;
};

double reachability(const Eigen::MatrixXd& data, const LofModel& m, const Eigen::RowVectorXd& x,
                    int neighbor) {
    const double d = (data.row(neighbor) - x).norm();
    return std::max(m.k_distance[static_cast<std::size_t>(neighbor)], d);
}

double lrd_of(const Eigen::MatrixXd& data, const LofModel& m, const Eigen::RowVectorXd& x,
              const std::vector<int>& neighborhood) {
    double acc = 0.0;
    for (int j : neighborhood) acc += reachability(data, m, x, j);
    const double k = static_cast<double>(neighborhood.size());
    // Duplicate points give zero reachability sums; cap the density instead
    // of dividing by zero so ratios of equal densities stay at 1.
    return k / std::max(acc, k * 1e-12);
}

LofModel build_lof(const Eigen::MatrixXd& data, int k) {
    const auto n = static_cast<std::size_t>(data.rows());
    LofModel m;
    m.neighbors.resize(n);
    m.k_distance.resize(n);
    m.lrd.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.neighbors[i] = knn_indices(data, data.row(static_cast<Eigen::Index>(i)), k,
                                     static_cast<int>(i));
        m.k_distance[i] =
            (data.row(m.neighbors[i].back()) - data.row(static_cast<Eigen::Index>(i))).norm();
    }
    for (std::size_t i = 0; i < n; ++i)
        m.lrd[i] = lrd_of(data, m, data.row(static_cast<Eigen::Index>(i)), m.neighbors[i]);
    return m;
}

double lof_from_model(const Eigen::MatrixXd& data, const LofModel& m, const Eigen::RowVectorXd& x,
                      const std::vector<int>& neighborhood) {
    const double own_lrd = lrd_of(data, m, x, neighborhood);
    double acc = 0.0;
    for (int j : neighborhood) acc += m.lrd[static_cast<std::size_t>(j)] / own_lrd;
    return acc / static_cast<double>(neighborhood.size());
}

} // namespace

double LofDetector::lof_score(const Eigen::MatrixXd& train, const Eigen::RowVectorXd& x, int k,
                              int skip_row) {
    const LofModel m = build_lof(train, k);
    const auto neighborhood = knn_indices(train, x, k, skip_row);
    return lof_from_model(train, m, x, neighborhood);
}

LofDetector::LofDetector(const DetectorConfig& config, const FeatureTable& train) {
    if (config.lof_k < 1)
        throw InvalidConfig("LOF needs k >= 1");
    if (static_cast<int>(train.rows()) <= config.lof_k)
        throw InsufficientData("LOF needs more training rows than k");
    data_ = init_base(*this, config, train, /*standardize=*/true);

    const LofModel m = build_lof(data_, config.lof_k);
    std::vector<double> scores;
    scores.reserve(train.rows());
    for (Eigen::Index i = 0; i < data_.rows(); ++i)
        scores.push_back(lof_from_model(data_, m, data_.row(i),
                                        m.neighbors[static_cast<std::size_t>(i)]));
    set_train_scores(*this, std::move(scores));
}

double LofDetector::score_impl(const Eigen::RowVectorXd& x) const {
    return lof_score(data_, x, config_.lof_k, -1);
}

// ---------------------------------------------------------------- FastABOD

double FastAbodDetector::abof_score(const Eigen::MatrixXd& train, const Eigen::RowVectorXd& x,
                                    int k, int skip_row) {
    const auto neighbors = knn_indices(train, x, k, skip_row);
    double w_sum = 0.0, wv_sum = 0.0, wvv_sum = 0.0;
    std::size_t pairs = 0, skipped = 0;
    for (std::size_t a = 0; a < neighbors.size(); ++a) {
        for (std::size_t b = a + 1; b < neighbors.size(); ++b) {
            const Eigen::RowVectorXd ab = train.row(neighbors[a]) - x;
            const Eigen::RowVectorXd ac = train.row(neighbors[b]) - x;
            const double nab = ab.norm();
            const double nac = ac.norm();
            ++pairs;
            if (nab < 1e-12 || nac < 1e-12) {
                ++skipped;
                continue;
            }
            const double v = ab.dot(ac) / (nab * nab * nac * nac);
            const double w = 1.0 / (nab * nac);
            w_sum += w;
            wv_sum += w * v;
            wvv_sum += w * v * v;
        }
    }
    if (pairs == 0 || skipped == pairs)
        throw DegenerateGeometry("all neighbor pairs coincide with the query point");
    const double mean = wv_sum / w_sum;
    const double var = std::max(wvv_sum / w_sum - mean * mean, 0.0);
    return -var; // small angle variance (outlier) maps to a large score
}

FastAbodDetector::FastAbodDetector(const DetectorConfig& config, const FeatureTable& train) {
    if (config.abod_k < 2)
        throw InvalidConfig("FastABOD needs k >= 2");
    if (static_cast<int>(train.rows()) <= config.abod_k)
        throw InsufficientData("FastABOD needs more training rows than k");
    data_ = init_base(*this, config, train, /*standardize=*/true);

    std::vector<double> scores;
    scores.reserve(train.rows());
    for (Eigen::Index i = 0; i < data_.rows(); ++i)
        scores.push_back(abof_score(data_, data_.row(i), config.abod_k, static_cast<int>(i)));
    set_train_scores(*this, std::move(scores));
}

double FastAbodDetector::score_impl(const Eigen::RowVectorXd& x) const {
    return abof_score(data_, x, config_.abod_k, -1);
}

} // namespace vibroad::impl
