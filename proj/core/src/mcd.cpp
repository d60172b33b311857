#include "detectors_impl.hpp"

#include "vibroad/errors.hpp"
#include "vibroad/rng.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>

namespace vibroad::impl {

namespace {

struct Estimate {
    Eigen::RowVectorXd mean;
    Eigen::MatrixXd cov;
    double logdet = 0.0;
    bool ok = false;
};

Estimate estimate_from(const Eigen::MatrixXd& data, const std::vector<int>& rows,
                       bool assume_centered) {
    Estimate e;
    const auto h = static_cast<double>(rows.size());
    const Eigen::Index p = data.cols();
    e.mean = Eigen::RowVectorXd::Zero(p);
    if (!assume_centered) {
        for (int r : rows) e.mean += data.row(r);
        e.mean /= h;
    }
    e.cov = Eigen::MatrixXd::Zero(p, p);
    for (int r : rows) {
        const Eigen::RowVectorXd d = data.row(r) - e.mean;
        e.cov += d.transpose() * d;
    }
    e.cov /= h;
    const Eigen::LLT<Eigen::MatrixXd> llt(e.cov);
    if (llt.info() != Eigen::Success) return e;
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        const double l = llt.matrixL()(i, i);
        if (l <= 1e-12) return e;
        logdet += 2.0 * std::log(l);
    }
    e.logdet = logdet;
    e.ok = true;
    return e;
}

std::vector<int> smallest_h(const Eigen::MatrixXd& data, const Estimate& e, int h) {
    const Eigen::MatrixXd inv = e.cov.llt().solve(Eigen::MatrixXd::Identity(data.cols(), data.cols()));
    std::vector<std::pair<double, int>> d2(static_cast<std::size_t>(data.rows()));
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        const Eigen::RowVectorXd d = data.row(i) - e.mean;
        d2[static_cast<std::size_t>(i)] = {d * inv * d.transpose(), static_cast<int>(i)};
    }
    std::sort(d2.begin(), d2.end());
    std::vector<int> out(static_cast<std::size_t>(h));
    for (int i = 0; i < h; ++i) out[static_cast<std::size_t>(i)] = d2[static_cast<std::size_t>(i)].second;
    std::sort(out.begin(), out.end());
    return out;
}

// One C-step: re-estimate from the h points with smallest Mahalanobis
// distance under the current estimate. Determinant is non-increasing.
Estimate c_step(const Eigen::MatrixXd& data, const Estimate& e, int h, bool assume_centered) {
    return estimate_from(data, smallest_h(data, e, h), assume_centered);
}

} // namespace

McdDetector::McdDetector(const DetectorConfig& config, const FeatureTable& train) {
    const Eigen::MatrixXd data = init_base(*this, config, train, /*standardize=*/true);
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();
    if (n < p + 2)
        throw InsufficientData("MCD needs at least p + 2 rows");

    const int h = static_cast<int>((n + p + 1) / 2);

    // Full-sample estimate doubles as a singularity check: a rank-deficient
    // table cannot support any Mahalanobis scoring.
    std::vector<int> all(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = static_cast<int>(i);
    Estimate best = estimate_from(data, all, config.mcd_assume_centered);
    if (!best.ok)
        throw SingularCovariance("training covariance is singular; jitter the data or drop constant columns");
    best = c_step(data, best, h, config.mcd_assume_centered);

    Rng rng(config.seed ^ 0x4D43445FULL);
    const int n_subsets = 500;
    for (int s = 0; s < n_subsets; ++s) {
        // Random elemental (p+1)-subset, two cheap C-steps, keep the winner.
        std::vector<int> subset;
        while (subset.size() < static_cast<std::size_t>(p + 1)) {
            const int r = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
            if (std::find(subset.begin(), subset.end(), r) == subset.end()) subset.push_back(r);
        }
        Estimate e = estimate_from(data, subset, config.mcd_assume_centered);
        if (!e.ok) continue;
        for (int c = 0; c < 2; ++c) {
            Estimate next = c_step(data, e, h, config.mcd_assume_centered);
            if (!next.ok) break;
            e = next;
        }
        if (e.ok && e.logdet < best.logdet) best = e;
    }

    // Iterate the best candidate to convergence.
    for (int c = 0; c < 50; ++c) {
        Estimate next = c_step(data, best, h, config.mcd_assume_centered);
        if (!next.ok || next.logdet >= best.logdet - 1e-12) break;
        best = next;
    }

    // Consistency rescaling so the robust covariance estimates the full
    // distribution's covariance under normality.
    const Eigen::MatrixXd inv_raw = best.cov.llt().solve(Eigen::MatrixXd::Identity(p, p));
    std::vector<double> d2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::RowVectorXd d = data.row(i) - best.mean;
        d2[static_cast<std::size_t>(i)] = d * inv_raw * d.transpose();
    }
    std::nth_element(d2.begin(), d2.begin() + n / 2, d2.end());
    const double med = d2[static_cast<std::size_t>(n / 2)];
    const boost::math::chi_squared chi2(static_cast<double>(p));
    const double factor = med / boost::math::quantile(chi2, 0.5);
    location_ = best.mean;
    covariance_ = best.cov * std::max(factor, 1e-12);
    cov_inverse_ = covariance_.llt().solve(Eigen::MatrixXd::Identity(p, p));

    std::vector<double> scores;
    scores.reserve(train.rows());
    for (Eigen::Index i = 0; i < n; ++i) scores.push_back(score_impl(data.row(i)));
    set_train_scores(*this, std::move(scores));
}

double McdDetector::score_impl(const Eigen::RowVectorXd& x) const {
    const Eigen::RowVectorXd d = x - location_;
    return std::sqrt(std::max(0.0, static_cast<double>(d * cov_inverse_ * d.transpose())));
}

} // namespace vibroad::impl
