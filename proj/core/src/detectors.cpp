#include "vibroad/detectors.hpp"

#include "detectors_impl.hpp"
#include "vibroad/errors.hpp"
#include "vibroad/iforest.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace vibroad {

using nlohmann::json;

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Knn: return "kNN";
        case Algorithm::Mcd: return "MCD";
        case Algorithm::Lof: return "LOF";
        case Algorithm::Cblof: return "CBLOF";
        case Algorithm::Ocsvm: return "OCSVM";
        case Algorithm::FeatureBagging: return "FB";
        case Algorithm::FastAbod: return "FastABOD";
        case Algorithm::IsolationForest: return "IF";
        case Algorithm::Hbos: return "HBOS";
        case Algorithm::Loda: return "LODA";
        case Algorithm::Ensemble: return "Ensemble";
    }
    return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
    static const std::vector<Algorithm> all = {
        Algorithm::Knn, Algorithm::Mcd, Algorithm::Lof, Algorithm::Cblof,
        Algorithm::Ocsvm, Algorithm::FeatureBagging, Algorithm::FastAbod,
        Algorithm::IsolationForest, Algorithm::Hbos, Algorithm::Loda, Algorithm::Ensemble};
    auto lower = [](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return s;
    };
    for (Algorithm a : all)
        if (lower(algorithm_name(a)) == lower(name)) return a;
    throw InvalidConfig("unknown algorithm: " + name);
}

DetectorConfig DetectorConfig::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("detector config is not valid JSON: ") + e.what());
    }
    DetectorConfig cfg;
    cfg.algorithm = algorithm_from_name(doc.at("algorithm").get<std::string>());
    cfg.seed = doc.value("seed", std::uint64_t{0});
    cfg.standardize = doc.value("standardize", true);
    const json params = doc.value("params", json::object());
    cfg.knn_k = params.value("n_neighbors", cfg.algorithm == Algorithm::FastAbod ? 5 : cfg.knn_k);
    if (params.contains("method")) {
        const auto m = params.at("method").get<std::string>();
        if (m == "largest") cfg.knn_method = KnnMethod::Largest;
        else if (m == "mean") cfg.knn_method = KnnMethod::Mean;
        else if (m == "median") cfg.knn_method = KnnMethod::Median;
        else throw InvalidConfig("unknown kNN method: " + m);
    }
    cfg.mcd_assume_centered = params.value("assume_centered", cfg.mcd_assume_centered);
    if (cfg.algorithm == Algorithm::Lof) cfg.lof_k = params.value("n_neighbors", cfg.lof_k);
    if (cfg.algorithm == Algorithm::FastAbod) cfg.abod_k = params.value("n_neighbors", cfg.abod_k);
    cfg.cblof_n_clusters = params.value("n_clusters", cfg.cblof_n_clusters);
    cfg.cblof_alpha = params.value("alpha", cfg.cblof_alpha);
    cfg.cblof_beta = params.value("beta", cfg.cblof_beta);
    if (cfg.algorithm == Algorithm::Hbos) cfg.hbos_alpha = params.value("alpha", cfg.hbos_alpha);
    cfg.ocsvm_gamma = params.value("gamma", cfg.ocsvm_gamma);
    cfg.ocsvm_nu = params.value("nu", cfg.ocsvm_nu);
    if (cfg.algorithm == Algorithm::FeatureBagging)
        cfg.fb_n_estimators = params.value("n_estimators", cfg.fb_n_estimators);
    cfg.fb_max_features = params.value("max_features", cfg.fb_max_features);
    if (params.contains("combination")) {
        const auto c = params.at("combination").get<std::string>();
        if (c == "average") cfg.fb_combination = Combination::Average;
        else if (c == "max") cfg.fb_combination = Combination::Max;
        else throw InvalidConfig("unknown combination: " + c);
    }
    if (cfg.algorithm == Algorithm::IsolationForest)
        cfg.if_n_estimators = params.value("n_estimators", cfg.if_n_estimators);
    cfg.if_max_samples = params.value("max_samples", cfg.if_max_samples);
    cfg.hbos_n_bins = params.value("n_bins", cfg.hbos_n_bins);
    cfg.hbos_tol = params.value("tol", cfg.hbos_tol);
    if (cfg.algorithm == Algorithm::Loda) cfg.loda_n_bins = params.value("n_bins", cfg.loda_n_bins);
    cfg.loda_n_random_cuts = params.value("n_random_cuts", cfg.loda_n_random_cuts);
    if (doc.contains("ensemble_members"))
        for (const auto& m : doc.at("ensemble_members"))
            cfg.ensemble_members.push_back(algorithm_from_name(m.get<std::string>()));
    return cfg;
}

DetectorConfig DetectorConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string DetectorConfig::to_json() const {
    json params = json::object();
    switch (algorithm) {
        case Algorithm::Knn:
            params["n_neighbors"] = knn_k;
            params["method"] = knn_method == KnnMethod::Largest ? "largest"
                             : knn_method == KnnMethod::Mean    ? "mean"
                                                                : "median";
            break;
        case Algorithm::Mcd:
            params["assume_centered"] = mcd_assume_centered;
            break;
        case Algorithm::Lof:
            params["n_neighbors"] = lof_k;
            break;
        case Algorithm::Cblof:
            params["n_clusters"] = cblof_n_clusters;
            params["alpha"] = cblof_alpha;
            params["beta"] = cblof_beta;
            break;
        case Algorithm::Ocsvm:
            params["gamma"] = ocsvm_gamma;
            params["nu"] = ocsvm_nu;
            break;
        case Algorithm::FeatureBagging:
            params["n_estimators"] = fb_n_estimators;
            params["max_features"] = fb_max_features;
            params["combination"] = fb_combination == Combination::Average ? "average" : "max";
            break;
        case Algorithm::FastAbod:
            params["n_neighbors"] = abod_k;
            break;
        case Algorithm::IsolationForest:
            params["n_estimators"] = if_n_estimators;
            params["max_samples"] = if_max_samples;
            break;
        case Algorithm::Hbos:
            params["n_bins"] = hbos_n_bins;
            params["alpha"] = hbos_alpha;
            params["tol"] = hbos_tol;
            break;
        case Algorithm::Loda:
            params["n_bins"] = loda_n_bins;
            params["n_random_cuts"] = loda_n_random_cuts;
            break;
        case Algorithm::Ensemble:
            break;
    }
    json doc;
    doc["algorithm"] = algorithm_name(algorithm);
    doc["seed"] = seed;
    doc["standardize"] = standardize;
    doc["params"] = params;
    if (!ensemble_members.empty()) {
        doc["ensemble_members"] = json::array();
        for (Algorithm a : ensemble_members) doc["ensemble_members"].push_back(algorithm_name(a));
    }
    return doc.dump(2);
}

namespace detail {

double quantile(std::vector<double> values, double q) {
    if (values.empty())
        throw InsufficientData("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double combine_scores(const std::vector<double>& scores, Combination combination) {
    if (scores.empty())
        throw EmptyEnsemble("no scores to combine");
    if (combination == Combination::Max)
        return *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double s : scores) sum += s;
    return sum / static_cast<double>(scores.size());
}

double loda_score_from_probs(const std::vector<double>& probs) {
    if (probs.empty())
        throw InvalidConfig("no projections");
    double acc = 0.0;
    for (double p : probs) acc += std::log(std::max(p, 1e-12));
    return -acc / static_cast<double>(probs.size());
}

double average_path_length(std::size_t n) {
    if (n <= 1) return 0.0;
    const double m = static_cast<double>(n);
    const double harmonic = std::log(m - 1.0) + std::numbers::egamma;
    return 2.0 * harmonic - 2.0 * (m - 1.0) / m;
}

} // namespace detail

double FittedDetector::score_point(const Eigen::RowVectorXd& x) const {
    if (x.cols() != static_cast<Eigen::Index>(columns_.size()))
        throw InvalidSpec("feature vector width does not match detector");
    return score_impl(scaling_ ? scaling_->apply(x) : x);
}

double FittedDetector::score(const FeatureVector& x) const {
    if (x.names != columns_)
        throw InvalidSpec("feature vector columns do not match detector");
    return score_point(x.values);
}

double FittedDetector::threshold(const ThresholdRule& rule) const {
    if (rule.kind == ThresholdRule::Kind::MaxTrain) {
        const double mx = *std::max_element(train_scores_.begin(), train_scores_.end());
        return mx * (1.0 + rule.margin);
    }
    if (!(rule.contamination > 0.0 && rule.contamination < 1.0))
        throw InvalidContamination("contamination must lie in (0,1)");
    return detail::quantile(train_scores_, 1.0 - rule.contamination);
}

ScoredSample FittedDetector::decide(const FeatureVector& x, double thr) const {
    ScoredSample out;
    out.score = score(x);
    out.threshold_used = thr;
    out.is_anomaly = out.score > thr;
    const double lo = *std::min_element(train_scores_.begin(), train_scores_.end());
    const double hi = *std::max_element(train_scores_.begin(), train_scores_.end());
    out.normalized_score = hi > lo ? std::clamp((out.score - lo) / (hi - lo), 0.0, 1.0)
                                   : (out.score > hi ? 1.0 : 0.0);
    return out;
}

ScoredSample FittedDetector::decide_with_rule(const FeatureVector& x, const ThresholdRule& rule) const {
    return decide(x, threshold(rule));
}

bool ensemble_decide(const std::vector<bool>& decisions) {
    if (decisions.empty())
        throw EmptyEnsemble("majority vote over zero decisions");
    const auto votes = static_cast<double>(std::count(decisions.begin(), decisions.end(), true));
    return votes > static_cast<double>(decisions.size()) / 2.0;
}

namespace impl {

Eigen::MatrixXd init_base(FittedDetector& det, const DetectorConfig& config,
                          const FeatureTable& train, bool standardize_inputs) {
    if (train.rows() == 0)
        throw InsufficientData("empty training table");
    det.config_ = config;
    det.columns_ = train.columns;
    det.train_raw_ = train;
    det.train_raw_.labels.clear();
    if (!standardize_inputs || !config.standardize) {
        det.scaling_.reset();
        return train.data;
    }
    auto [scaled, params] = standardize(train, train);
    det.scaling_ = std::move(params);
    return scaled.data;
}

void set_train_scores(FittedDetector& det, std::vector<double> scores) {
    det.train_scores_ = std::move(scores);
}

std::vector<double> sorted_distances(const Eigen::MatrixXd& data, const Eigen::RowVectorXd& x,
                                     int skip_row) {
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(data.rows()));
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        if (static_cast<int>(i) == skip_row) continue;
        dist.push_back((data.row(i) - x).norm());
    }
    std::sort(dist.begin(), dist.end());
    return dist;
}

std::vector<int> knn_indices(const Eigen::MatrixXd& data, const Eigen::RowVectorXd& x, int k,
                             int skip_row) {
    std::vector<std::pair<double, int>> dist;
    dist.reserve(static_cast<std::size_t>(data.rows()));
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        if (static_cast<int>(i) == skip_row) continue;
        dist.emplace_back((data.row(i) - x).norm(), static_cast<int>(i));
    }
    std::sort(dist.begin(), dist.end());
    std::vector<int> out;
    const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), dist.size());
    out.reserve(kk);
    for (std::size_t i = 0; i < kk; ++i) out.push_back(dist[i].second);
    return out;
}

} // namespace impl

std::unique_ptr<FittedDetector> fit(const DetectorConfig& config, const FeatureTable& train) {
    if (train.rows() == 0)
        throw InsufficientData("empty training table");
    switch (config.algorithm) {
        case Algorithm::Knn: return std::make_unique<impl::KnnDetector>(config, train);
        case Algorithm::Mcd: return std::make_unique<impl::McdDetector>(config, train);
        case Algorithm::Lof: return std::make_unique<impl::LofDetector>(config, train);
        case Algorithm::Cblof: return std::make_unique<impl::CblofDetector>(config, train);
        case Algorithm::Ocsvm: return std::make_unique<impl::OcsvmDetector>(config, train);
        case Algorithm::FeatureBagging:
            return std::make_unique<impl::FeatureBaggingDetector>(config, train);
        case Algorithm::FastAbod: return std::make_unique<impl::FastAbodDetector>(config, train);
        case Algorithm::IsolationForest:
            return std::make_unique<IsolationForestDetector>(config, train);
        case Algorithm::Hbos: return std::make_unique<impl::HbosDetector>(config, train);
        case Algorithm::Loda: return std::make_unique<impl::LodaDetector>(config, train);
        case Algorithm::Ensemble: return std::make_unique<impl::EnsembleDetector>(config, train);
    }
    throw InvalidConfig("unknown algorithm id");
}

SlidingWindowResult sliding_window_run(const FeatureTable& stream, const DetectorConfig& config,
                                       int init_n, const ThresholdRule& rule,
                                       const SlidingWindowOptions& options) {
    if (init_n <= 0 || static_cast<std::size_t>(init_n) > stream.rows())
        throw InsufficientData("stream shorter than the initial window");

    FeatureTable training;
    training.columns = stream.columns;
    training.data = stream.data.topRows(init_n);

    Rng dropout_rng(options.dropout_seed ^ config.seed);
    auto refit = [&]() {
        if (options.dropout > 0.0 && training.rows() > 2) {
            FeatureTable kept;
            kept.columns = training.columns;
            std::vector<Eigen::Index> keep;
            for (Eigen::Index i = 0; i < training.data.rows(); ++i)
                if (dropout_rng.uniform() >= options.dropout) keep.push_back(i);
            if (keep.size() < 2) keep = {0, 1};
            kept.data.resize(static_cast<Eigen::Index>(keep.size()), training.data.cols());
            for (std::size_t i = 0; i < keep.size(); ++i)
                kept.data.row(static_cast<Eigen::Index>(i)) = training.data.row(keep[i]);
            return fit(config, kept);
        }
        return fit(config, training);
    };

    auto model = refit();

    SlidingWindowResult result;
    result.samples.reserve(stream.rows());

    // Warm-up rows are scored retrospectively against the initial model.
    for (int i = 0; i < init_n; ++i) {
        ScoredSample s = model->decide_with_rule(stream.row(static_cast<std::size_t>(i)), rule);
        s.warmup = true;
        result.samples.push_back(s);
    }

    int accepted_since_refit = 0;
    for (std::size_t i = static_cast<std::size_t>(init_n); i < stream.rows(); ++i) {
        const ScoredSample s = model->decide_with_rule(stream.row(i), rule);
        result.samples.push_back(s);
        if (!s.is_anomaly) {
            training.append_row(stream.data.row(static_cast<Eigen::Index>(i)));
            if (++accepted_since_refit >= options.refit_every) {
                model = refit();
                accepted_since_refit = 0;
            }
        }
    }
    result.final_training = std::move(training);
    return result;
}

} // namespace vibroad
