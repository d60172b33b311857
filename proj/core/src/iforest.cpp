#include "vibroad/iforest.hpp"

#include "detectors_impl.hpp"
#include "vibroad/errors.hpp"
#include "vibroad/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vibroad {

namespace {

struct TreeBuilder {
    const Eigen::MatrixXd& data;
    int height_limit;
    Rng& rng;
    std::vector<IsolationForestDetector::Node>& nodes;

    int build(std::vector<int>& rows, int depth) {
        const int id = static_cast<int>(nodes.size());
        nodes.push_back({});
        nodes[static_cast<std::size_t>(id)].size = static_cast<int>(rows.size());
        if (static_cast<int>(rows.size()) <= 1 || depth >= height_limit)
            return id;

        // Split on a random feature with spread in this node.
        std::vector<int> candidates;
        for (Eigen::Index f = 0; f < data.cols(); ++f) {
            double lo = data(rows[0], f), hi = lo;
            for (int r : rows) {
                lo = std::min(lo, data(r, f));
                hi = std::max(hi, data(r, f));
            }
            if (hi > lo) candidates.push_back(static_cast<int>(f));
        }
        if (candidates.empty()) return id;

        const int feature =
            candidates[rng.uniform_int(static_cast<std::uint64_t>(candidates.size()))];
        double lo = data(rows[0], feature), hi = lo;
        for (int r : rows) {
            lo = std::min(lo, data(r, feature));
            hi = std::max(hi, data(r, feature));
        }
        const double threshold = rng.uniform(lo, hi);

        std::vector<int> left_rows, right_rows;
        for (int r : rows)
            (data(r, feature) < threshold ? left_rows : right_rows).push_back(r);
        if (left_rows.empty() || right_rows.empty()) return id;

        const int left = build(left_rows, depth + 1);
        const int right = build(right_rows, depth + 1);
        auto& node = nodes[static_cast<std::size_t>(id)];
        node.feature = feature;
        node.threshold = threshold;
        node.left = left;
        node.right = right;
        return id;
    }
};

} // namespace

IsolationForestDetector::IsolationForestDetector(const DetectorConfig& config,
                                                const FeatureTable& train) {
    if (config.if_n_estimators < 1 || config.if_max_samples < 1)
        throw InvalidConfig("isolation forest needs n_estimators >= 1 and max_samples >= 1");
    // Axis-aligned splits are invariant to per-feature scaling; fit raw.
    const Eigen::MatrixXd data = impl::init_base(*this, config, train, /*standardize=*/false);

    const int n = static_cast<int>(data.rows());
    subsample_size_ = std::min(config.if_max_samples, n);
    height_limit_ = static_cast<int>(
        std::ceil(std::log2(std::max(2.0, static_cast<double>(subsample_size_)))));

    Rng master(config.seed ^ 0x49464F52ULL);
    trees_.resize(static_cast<std::size_t>(config.if_n_estimators));
    for (int t = 0; t < config.if_n_estimators; ++t) {
        Rng rng = master.fork(static_cast<std::uint64_t>(t));
        // Subsample without replacement (Fisher-Yates prefix).
        std::vector<int> rows(static_cast<std::size_t>(n));
        std::iota(rows.begin(), rows.end(), 0);
        for (int i = 0; i < subsample_size_; ++i) {
            const auto j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - i)));
            std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
        }
        rows.resize(static_cast<std::size_t>(subsample_size_));
        TreeBuilder builder{data, height_limit_, rng, trees_[static_cast<std::size_t>(t)].nodes};
        builder.build(rows, 0);
    }

    std::vector<double> scores;
    scores.reserve(train.rows());
    for (Eigen::Index i = 0; i < data.rows(); ++i) scores.push_back(score_impl(data.row(i)));
    impl::set_train_scores(*this, std::move(scores));
}

double IsolationForestDetector::path_length(const Tree& tree, const Eigen::RowVectorXd& x,
                                            std::vector<int>* path_features,
                                            int* raw_depth) const {
    int id = 0;
    int depth = 0;
    while (tree.nodes[static_cast<std::size_t>(id)].feature >= 0) {
        const auto& node = tree.nodes[static_cast<std::size_t>(id)];
        if (path_features) path_features->push_back(node.feature);
        id = x(node.feature) < node.threshold ? node.left : node.right;
        ++depth;
    }
    if (raw_depth) *raw_depth = depth;
    const int leaf_size = tree.nodes[static_cast<std::size_t>(id)].size;
    return static_cast<double>(depth) + detail::average_path_length(static_cast<std::size_t>(leaf_size));
}

double IsolationForestDetector::score_impl(const Eigen::RowVectorXd& x) const {
    double total = 0.0;
    for (const auto& tree : trees_) total += path_length(tree, x);
    const double mean_path = total / static_cast<double>(trees_.size());
    const double c = detail::average_path_length(static_cast<std::size_t>(subsample_size_));
    if (c <= 0.0) return mean_path <= 0.0 ? 1.0 : 0.0;
    return std::pow(2.0, -mean_path / c);
}

} // namespace vibroad
