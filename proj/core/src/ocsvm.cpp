#include "detectors_impl.hpp"

#include "vibroad/errors.hpp"

#include <algorithm>
#include <cmath>

namespace vibroad::impl {

namespace {

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& data, double gamma) {
    const Eigen::Index n = data.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = std::exp(-gamma * (data.row(i) - data.row(j)).squaredNorm());
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

} // namespace

OcsvmDetector::OcsvmDetector(const DetectorConfig& config, const FeatureTable& train) {
    if (!(config.ocsvm_nu > 0.0 && config.ocsvm_nu <= 1.0))
        throw InvalidConfig("OCSVM needs nu in (0,1]");
    if (!(config.ocsvm_gamma > 0.0))
        throw InvalidConfig("OCSVM needs gamma > 0");
    data_ = init_base(*this, config, train, /*standardize=*/true);

    const Eigen::Index n = data_.rows();
    const double cap = 1.0 / (config.ocsvm_nu * static_cast<double>(n));
    const Eigen::MatrixXd gram = rbf_gram(data_, config.ocsvm_gamma);

    // nu-parameterized dual: min 1/2 a'Ka, 0 <= a_i <= 1/(nu n), sum a = 1.
    // Pairwise coordinate optimization on the maximally violating pair.
    alpha_ = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    Eigen::VectorXd grad = gram * alpha_;

    const double tol = 1e-6;
    const int max_passes = 10000;
    for (int pass = 0; pass < max_passes; ++pass) {
        int up = -1, down = -1;
        double g_up = std::numeric_limits<double>::max();
        double g_down = -std::numeric_limits<double>::max();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (alpha_(i) < cap - 1e-15 && grad(i) < g_up) {
                g_up = grad(i);
                up = static_cast<int>(i);
            }
            if (alpha_(i) > 1e-15 && grad(i) > g_down) {
                g_down = grad(i);
                down = static_cast<int>(i);
            }
        }
        if (up < 0 || down < 0 || g_down - g_up < tol) break;

        const double denom = gram(up, up) + gram(down, down) - 2.0 * gram(up, down);
        double delta = denom > 1e-15 ? (g_down - g_up) / denom : cap;
        delta = std::min({delta, cap - alpha_(up), alpha_(down)});
        if (delta <= 0.0) break;
        alpha_(up) += delta;
        alpha_(down) -= delta;
        grad += delta * (gram.col(up) - gram.col(down));
    }

    // rho from margin support vectors: 0 < alpha < cap.
    double rho_acc = 0.0;
    int rho_count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (alpha_(i) > 1e-9 && alpha_(i) < cap - 1e-9) {
            rho_acc += grad(i);
            ++rho_count;
        }
    }
    if (rho_count > 0) {
        rho_ = rho_acc / rho_count;
    } else {
        // All alphas at bounds; take the midpoint of the feasible range.
        double lo = -std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::max();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (alpha_(i) > 1e-9) lo = std::max(lo, grad(i));
            if (alpha_(i) < cap - 1e-9) hi = std::min(hi, grad(i));
        }
        rho_ = 0.5 * (lo + hi);
    }

    std::vector<double> scores;
    scores.reserve(train.rows());
    for (Eigen::Index i = 0; i < n; ++i) scores.push_back(score_impl(data_.row(i)));
    set_train_scores(*this, std::move(scores));
}

double OcsvmDetector::score_impl(const Eigen::RowVectorXd& x) const {
    double decision = 0.0;
    for (Eigen::Index i = 0; i < data_.rows(); ++i) {
        if (alpha_(i) <= 0.0) continue;
        decision += alpha_(i) * std::exp(-config_.ocsvm_gamma * (data_.row(i) - x).squaredNorm());
    }
    return rho_ - decision; // larger = more anomalous
}

} // namespace vibroad::impl
