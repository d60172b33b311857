#include "detectors_impl.hpp"

#include "vibroad/errors.hpp"
#include "vibroad/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vibroad::impl {

namespace {

// k-means with k-means++ seeding; deterministic for a fixed seed.
struct KMeansResult {
    Eigen::MatrixXd centroids;
    std::vector<int> assignment;
    std::vector<int> sizes;
};

KMeansResult kmeans(const Eigen::MatrixXd& data, int k, Rng& rng) {
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();
    KMeansResult res;
    res.centroids.resize(k, p);

    // k-means++ seeding
    std::vector<double> min_d2(static_cast<std::size_t>(n), std::numeric_limits<double>::max());
    const auto first = static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    res.centroids.row(0) = data.row(first);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d2 = (data.row(i) - res.centroids.row(c - 1)).squaredNorm();
            auto& m = min_d2[static_cast<std::size_t>(i)];
            m = std::min(m, d2);
            total += m;
        }
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= min_d2[static_cast<std::size_t>(i)];
                if (target <= 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        }
        res.centroids.row(c) = data.row(pick);
    }

    res.assignment.assign(static_cast<std::size_t>(n), 0);
    for (int iter = 0; iter < 300; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::max();
            for (int c = 0; c < k; ++c) {
                const double d = (data.row(i) - res.centroids.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (res.assignment[static_cast<std::size_t>(i)] != best) {
                res.assignment[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, p);
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(res.assignment[static_cast<std::size_t>(i)]) += data.row(i);
            ++counts[static_cast<std::size_t>(res.assignment[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c)
            if (counts[static_cast<std::size_t>(c)] > 0)
                res.centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        if (!changed) break;
    }

    res.sizes.assign(static_cast<std::size_t>(k), 0);
    for (int a : res.assignment) ++res.sizes[static_cast<std::size_t>(a)];
    return res;
}

} // namespace

CblofDetector::CblofDetector(const DetectorConfig& config, const FeatureTable& train) {
    if (config.cblof_n_clusters < 1)
        throw InvalidConfig("CBLOF needs n_clusters >= 1");
    const Eigen::MatrixXd data = init_base(*this, config, train, /*standardize=*/true);
    const int k = std::min<int>(config.cblof_n_clusters, static_cast<int>(data.rows()));

    Rng rng(config.seed ^ 0x43424C4FULL);
    const KMeansResult km = kmeans(data, k, rng);
    centroids_ = km.centroids;
    sizes_ = km.sizes;

    // Large/small split: clusters sorted by size descending; the boundary is
    // the first index where the cumulative size reaches alpha*N or the size
    // ratio to the next cluster reaches beta.
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return sizes_[static_cast<std::size_t>(a)] > sizes_[static_cast<std::size_t>(b)]; });

    const double n_total = static_cast<double>(data.rows());
    int boundary = k; // index into `order`: clusters before it are large
    int cumulative = 0;
    for (int i = 0; i < k; ++i) {
        cumulative += sizes_[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        const bool alpha_hit = static_cast<double>(cumulative) >= config.cblof_alpha * n_total;
        bool beta_hit = false;
        if (i + 1 < k) {
            const int next = sizes_[static_cast<std::size_t>(order[static_cast<std::size_t>(i + 1)])];
            beta_hit = next > 0 &&
                       static_cast<double>(sizes_[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]) /
                               static_cast<double>(next) >=
                           config.cblof_beta;
        }
        if (alpha_hit || beta_hit) {
            boundary = i + 1;
            break;
        }
    }
    large_.assign(static_cast<std::size_t>(k), false);
    for (int i = 0; i < boundary; ++i)
        large_[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;

    std::vector<double> scores;
    scores.reserve(train.rows());
    for (Eigen::Index i = 0; i < data.rows(); ++i) scores.push_back(score_impl(data.row(i)));
    set_train_scores(*this, std::move(scores));
}

double CblofDetector::score_impl(const Eigen::RowVectorXd& x) const {
    const int k = static_cast<int>(sizes_.size());
    int own = 0;
    double own_d = std::numeric_limits<double>::max();
    for (int c = 0; c < k; ++c) {
        const double d = (x - centroids_.row(c)).norm();
        if (d < own_d) {
            own_d = d;
            own = c;
        }
    }
    const double weight = static_cast<double>(sizes_[static_cast<std::size_t>(own)]);
    if (large_[static_cast<std::size_t>(own)])
        return weight * own_d;
    double nearest_large = std::numeric_limits<double>::max();
    for (int c = 0; c < k; ++c)
        if (large_[static_cast<std::size_t>(c)])
            nearest_large = std::min(nearest_large, (x - centroids_.row(c)).norm());
    if (nearest_large == std::numeric_limits<double>::max())
        nearest_large = own_d; // no large cluster exists; fall back to own centroid
    return weight * nearest_large;
}

} // namespace vibroad::impl
