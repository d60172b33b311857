#include "detectors_impl.hpp"

#include "vibroad/errors.hpp"
#include "vibroad/rng.hpp"

#include <algorithm>
#include <cmath>

namespace vibroad::impl {

// ---------------------------------------------------------------- HBOS

HbosDetector::HbosDetector(const DetectorConfig& config, const FeatureTable& train) {
    if (config.hbos_n_bins < 1)
        throw InvalidConfig("HBOS needs n_bins >= 1");
    // Per-feature histograms do not need scaling.
    const Eigen::MatrixXd data = init_base(*this, config, train, /*standardize=*/false);

    const Eigen::Index p = data.cols();
    const auto bins = static_cast<std::size_t>(config.hbos_n_bins);
    histograms_.resize(static_cast<std::size_t>(p));
    for (Eigen::Index f = 0; f < p; ++f) {
        auto& h = histograms_[static_cast<std::size_t>(f)];
        h.lo = data.col(f).minCoeff();
        h.hi = data.col(f).maxCoeff();
        std::vector<int> counts(bins, 0);
        if (h.hi > h.lo) {
            const double width = (h.hi - h.lo) / static_cast<double>(bins);
            for (Eigen::Index i = 0; i < data.rows(); ++i) {
                auto b = static_cast<std::size_t>((data(i, f) - h.lo) / width);
                b = std::min(b, bins - 1);
                ++counts[b];
            }
        } else {
            counts[0] = static_cast<int>(data.rows()); // constant feature
        }
        const int tallest = *std::max_element(counts.begin(), counts.end());
        h.heights.resize(bins);
        for (std::size_t b = 0; b < bins; ++b)
            h.heights[b] = static_cast<double>(counts[b]) / static_cast<double>(tallest);
    }

    std::vector<double> scores;
    scores.reserve(train.rows());
    for (Eigen::Index i = 0; i < data.rows(); ++i) scores.push_back(score_impl(data.row(i)));
    set_train_scores(*this, std::move(scores));
}

double HbosDetector::score_impl(const Eigen::RowVectorXd& x) const {
    double score = 0.0;
    for (std::size_t f = 0; f < histograms_.size(); ++f) {
        const auto& h = histograms_[f];
        const double v = x(static_cast<Eigen::Index>(f));
        double height;
        if (v < h.lo || v > h.hi) {
            // Out-of-range samples fall in a virtual bin of height tol.
            height = config_.hbos_tol;
        } else if (h.hi > h.lo) {
            const double width = (h.hi - h.lo) / static_cast<double>(h.heights.size());
            auto b = static_cast<std::size_t>((v - h.lo) / width);
            b = std::min(b, h.heights.size() - 1);
            height = h.heights[b];
        } else {
            height = h.heights[0];
        }
        // Additive alpha smoothing on normalized heights.
        score += std::log(1.0 / (height + config_.hbos_alpha));
    }
    return score;
}

// ---------------------------------------------------------------- LODA

LodaDetector::LodaDetector(const DetectorConfig& config, const FeatureTable& train) {
    if (config.loda_n_bins < 1 || config.loda_n_random_cuts < 1)
        throw InvalidConfig("LODA needs n_bins >= 1 and n_random_cuts >= 1");
    const Eigen::MatrixXd data = init_base(*this, config, train, /*standardize=*/true);

    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();
    const auto nonzero = static_cast<std::size_t>(
        std::max<double>(1.0, std::ceil(std::sqrt(static_cast<double>(p)))));
    const auto bins = static_cast<std::size_t>(config.loda_n_bins);

    Rng rng(config.seed ^ 0x4C4F4441ULL);
    projections_.resize(static_cast<std::size_t>(config.loda_n_random_cuts));
    for (auto& proj : projections_) {
        proj.w = Eigen::VectorXd::Zero(p);
        // sqrt(p) non-zero standard-normal entries
        std::vector<int> idx(static_cast<std::size_t>(p));
        for (Eigen::Index i = 0; i < p; ++i) idx[static_cast<std::size_t>(i)] = static_cast<int>(i);
        for (std::size_t i = 0; i < std::min(nonzero, idx.size()); ++i) {
            const auto j = i + rng.uniform_int(static_cast<std::uint64_t>(idx.size() - i));
            std::swap(idx[i], idx[j]);
            proj.w(idx[i]) = rng.normal();
        }

        Eigen::VectorXd z = data * proj.w;
        proj.lo = z.minCoeff();
        proj.hi = z.maxCoeff();
        std::vector<int> counts(bins, 0);
        if (proj.hi > proj.lo) {
            const double width = (proj.hi - proj.lo) / static_cast<double>(bins);
            for (Eigen::Index i = 0; i < n; ++i) {
                auto b = static_cast<std::size_t>((z(i) - proj.lo) / width);
                b = std::min(b, bins - 1);
                ++counts[b];
            }
        } else {
            counts[0] = static_cast<int>(n);
        }
        proj.probs.resize(bins);
        for (std::size_t b = 0; b < bins; ++b)
            proj.probs[b] = static_cast<double>(counts[b]) / static_cast<double>(n);
    }

    std::vector<double> scores;
    scores.reserve(train.rows());
    for (Eigen::Index i = 0; i < n; ++i) scores.push_back(score_impl(data.row(i)));
    set_train_scores(*this, std::move(scores));
}

double LodaDetector::score_impl(const Eigen::RowVectorXd& x) const {
    std::vector<double> probs;
    probs.reserve(projections_.size());
    for (const auto& proj : projections_) {
        const double z = x * proj.w;
        double prob = 0.0;
        if (z >= proj.lo && z <= proj.hi) {
            if (proj.hi > proj.lo) {
                const double width = (proj.hi - proj.lo) / static_cast<double>(proj.probs.size());
                auto b = static_cast<std::size_t>((z - proj.lo) / width);
                b = std::min(b, proj.probs.size() - 1);
                prob = proj.probs[b];
            } else {
                prob = proj.probs[0];
            }
        }
        probs.push_back(prob);
    }
    return detail::loda_score_from_probs(probs);
}

// ---------------------------------------------------------------- Feature bagging

FeatureBaggingDetector::FeatureBaggingDetector(const DetectorConfig& config,
                                               const FeatureTable& train) {
    if (config.fb_n_estimators < 1)
        throw InvalidConfig("feature bagging needs n_estimators >= 1");
    if (!(config.fb_max_features > 0.0 && config.fb_max_features <= 1.0))
        throw InvalidConfig("max_features must lie in (0,1]");
    if (static_cast<int>(train.rows()) <= config.lof_k)
        throw InsufficientData("feature bagging (LOF base) needs more rows than n_neighbors");
    data_ = init_base(*this, config, train, /*standardize=*/true);

    const Eigen::Index p = data_.cols();
    const auto subset_size = static_cast<std::size_t>(std::max<double>(
        1.0, std::llround(config.fb_max_features * static_cast<double>(p))));

    Rng rng(config.seed ^ 0x46424147ULL);
    feature_subsets_.resize(static_cast<std::size_t>(config.fb_n_estimators));
    for (auto& subset : feature_subsets_) {
        std::vector<int> idx(static_cast<std::size_t>(p));
        for (Eigen::Index i = 0; i < p; ++i) idx[static_cast<std::size_t>(i)] = static_cast<int>(i);
        for (std::size_t i = 0; i < std::min(subset_size, idx.size()); ++i) {
            const auto j = i + rng.uniform_int(static_cast<std::uint64_t>(idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(std::min(subset_size, idx.size()));
        std::sort(idx.begin(), idx.end());
        subset = std::move(idx);
    }

    std::vector<double> scores;
    scores.reserve(train.rows());
    for (Eigen::Index i = 0; i < data_.rows(); ++i) {
        std::vector<double> member_scores;
        member_scores.reserve(feature_subsets_.size());
        for (const auto& subset : feature_subsets_) {
            Eigen::MatrixXd sub(data_.rows(), static_cast<Eigen::Index>(subset.size()));
            for (std::size_t c = 0; c < subset.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = data_.col(subset[c]);
            member_scores.push_back(
                LofDetector::lof_score(sub, sub.row(i), config.lof_k, static_cast<int>(i)));
        }
        scores.push_back(detail::combine_scores(member_scores, config.fb_combination));
    }
    set_train_scores(*this, std::move(scores));
}

double FeatureBaggingDetector::score_impl(const Eigen::RowVectorXd& x) const {
    std::vector<double> member_scores;
    member_scores.reserve(feature_subsets_.size());
    for (const auto& subset : feature_subsets_) {
        Eigen::MatrixXd sub(data_.rows(), static_cast<Eigen::Index>(subset.size()));
        Eigen::RowVectorXd xs(static_cast<Eigen::Index>(subset.size()));
        for (std::size_t c = 0; c < subset.size(); ++c) {
            sub.col(static_cast<Eigen::Index>(c)) = data_.col(subset[c]);
            xs(static_cast<Eigen::Index>(c)) = x(subset[c]);
        }
        member_scores.push_back(LofDetector::lof_score(sub, xs, config_.lof_k, -1));
    }
    return detail::combine_scores(member_scores, config_.fb_combination);
}

} // namespace vibroad::impl
