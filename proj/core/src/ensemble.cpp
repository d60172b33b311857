#include "detectors_impl.hpp"

#include "vibroad/errors.hpp"

#include <algorithm>

namespace vibroad::impl {

namespace {

std::vector<Algorithm> default_members() {
    return {Algorithm::Knn,  Algorithm::Mcd,      Algorithm::Lof,
            Algorithm::Cblof, Algorithm::Ocsvm,    Algorithm::FeatureBagging,
            Algorithm::FastAbod, Algorithm::IsolationForest, Algorithm::Hbos,
            Algorithm::Loda};
}

double normalized(const FittedDetector& det, double score) {
    const auto& s = det.train_scores();
    const double lo = *std::min_element(s.begin(), s.end());
    const double hi = *std::max_element(s.begin(), s.end());
    if (hi <= lo) return score > hi ? 1.0 : 0.0;
    return std::clamp((score - lo) / (hi - lo), 0.0, 1.0);
}

} // namespace

EnsembleDetector::EnsembleDetector(const DetectorConfig& config, const FeatureTable& train) {
    // Members handle their own scaling; the ensemble passes raw vectors on.
    init_base(*this, config, train, /*standardize=*/false);

    auto member_algos = config.ensemble_members.empty() ? default_members() : config.ensemble_members;
    if (member_algos.empty())
        throw EmptyEnsemble("ensemble with no members");
    for (Algorithm a : member_algos) {
        if (a == Algorithm::Ensemble)
            throw InvalidConfig("ensemble cannot contain itself");
        DetectorConfig sub = config;
        sub.algorithm = a;
        sub.ensemble_members.clear();
        members_.push_back(fit(sub, train));
    }

    std::vector<double> scores;
    scores.reserve(train.rows());
    for (std::size_t i = 0; i < train.rows(); ++i)
        scores.push_back(normalized_member_mean(train.data.row(static_cast<Eigen::Index>(i))));
    set_train_scores(*this, std::move(scores));
}

double EnsembleDetector::normalized_member_mean(const Eigen::RowVectorXd& x_raw) const {
    double acc = 0.0;
    for (const auto& m : members_) acc += normalized(*m, m->score_point(x_raw));
    return acc / static_cast<double>(members_.size());
}

double EnsembleDetector::score_impl(const Eigen::RowVectorXd& x) const {
    return normalized_member_mean(x);
}

ScoredSample EnsembleDetector::decide_with_rule(const FeatureVector& x, const ThresholdRule& rule) const {
    std::vector<bool> votes;
    votes.reserve(members_.size());
    for (const auto& m : members_)
        votes.push_back(m->decide_with_rule(x, rule).is_anomaly);
    const auto fr = static_cast<double>(std::count(votes.begin(), votes.end(), true));
    ScoredSample out;
    out.score = fr;
    out.threshold_used = static_cast<double>(votes.size()) / 2.0;
    out.is_anomaly = ensemble_decide(votes);
    out.normalized_score = fr / static_cast<double>(votes.size());
    return out;
}

} // namespace vibroad::impl
