#include "vibroad/evaluation.hpp"

#include "vibroad/errors.hpp"
#include "vibroad/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace vibroad {

ConfusionMatrix confusion_matrix(const std::vector<bool>& pred, const std::vector<bool>& truth) {
    if (pred.empty() || pred.size() != truth.size())
        throw InvalidConfig("confusion_matrix: length mismatch or empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (truth[i])
            (pred[i] ? cm.tp : cm.fn)++;
        else
            (pred[i] ? cm.fp : cm.tn)++;
    }
    return cm;
}

double f1_score(const ConfusionMatrix& cm, bool* degenerate) {
    const double denom = 2.0 * cm.tp + cm.fp + cm.fn;
    if (degenerate)
        *degenerate = denom == 0.0;
    if (denom == 0.0)
        return 0.0;
    if (degenerate)
        *degenerate = cm.tp == 0;
    return 2.0 * cm.tp / denom;
}

double pr_auc(const std::vector<double>& scores, const std::vector<bool>& truth) {
    if (scores.empty() || scores.size() != truth.size())
        throw InvalidConfig("pr_auc: length mismatch or empty input");
    const long n_pos = std::count(truth.begin(), truth.end(), true);
    if (n_pos == 0)
        return 0.0;

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    // Average precision with tied scores collapsed into one operating point.
    double auc = 0.0;
    long tp = 0, fp = 0;
    double prev_recall = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]])
            ++j;
        for (std::size_t k = i; k < j; ++k)
            (truth[order[k]] ? tp : fp)++;
        const double recall = static_cast<double>(tp) / n_pos;
        const double precision = static_cast<double>(tp) / (tp + fp);
        auc += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return auc;
}

void EvalRun::aggregate() {
    const double n = static_cast<double>(iterations.size());
    if (iterations.empty())
        return;
    double f1s = 0, f1s2 = 0, ps = 0, ps2 = 0;
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (const auto& it : iterations) {
        f1s += it.f1;
        f1s2 += it.f1 * it.f1;
        ps += it.pr_auc;
        ps2 += it.pr_auc * it.pr_auc;
        tp += it.cm.tp;
        fp += it.cm.fp;
        fn += it.cm.fn;
        tn += it.cm.tn;
    }
    f1_mean = f1s / n;
    pr_auc_mean = ps / n;
    f1_std = std::sqrt(std::max(0.0, f1s2 / n - f1_mean * f1_mean));
    pr_auc_std = std::sqrt(std::max(0.0, ps2 / n - pr_auc_mean * pr_auc_mean));
    cm_mean.tp = std::lround(tp / n);
    cm_mean.fp = std::lround(fp / n);
    cm_mean.fn = std::lround(fn / n);
    cm_mean.tn = std::lround(tn / n);
}

std::string EvalRun::to_json() const {
    nlohmann::json j;
    j["f1_mean"] = f1_mean;
    j["f1_std"] = f1_std;
    j["pr_auc_mean"] = pr_auc_mean;
    j["pr_auc_std"] = pr_auc_std;
    j["cm_mean"] = {{"tp", cm_mean.tp}, {"fp", cm_mean.fp}, {"fn", cm_mean.fn}, {"tn", cm_mean.tn}};
    auto& arr = j["iterations"] = nlohmann::json::array();
    for (const auto& it : iterations) {
        arr.push_back({{"f1", it.f1},
                       {"pr_auc", it.pr_auc},
                       {"degenerate", it.degenerate},
                       {"tp", it.cm.tp},
                       {"fp", it.cm.fp},
                       {"fn", it.cm.fn},
                       {"tn", it.cm.tn}});
    }
    return j.dump(2);
}

void EvalRun::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << "iteration,f1,pr_auc,tp,fp,fn,tn,degenerate\n";
    for (std::size_t i = 0; i < iterations.size(); ++i) {
        const auto& it = iterations[i];
        out << i << ',' << it.f1 << ',' << it.pr_auc << ',' << it.cm.tp << ',' << it.cm.fp << ','
            << it.cm.fn << ',' << it.cm.tn << ',' << (it.degenerate ? 1 : 0) << '\n';
    }
}

namespace {

std::vector<std::size_t> pick(std::vector<std::size_t> pool, std::size_t n, Rng& rng) {
    // Fisher-Yates prefix.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(n);
    return pool;
}

} // namespace

EvalRun run_static_experiment(const FeatureTable& labeled, const DetectorConfig& config, int iters,
                              std::uint64_t seed, double normal_frac, double anomaly_frac) {
    if (iters < 1)
        throw InvalidConfig("run_static_experiment: iters must be >= 1");
    if (labeled.labels.size() != static_cast<std::size_t>(labeled.data.rows()))
        throw InvalidConfig("run_static_experiment: table is not labeled");

    std::vector<std::size_t> normals, anomalies;
    for (std::size_t i = 0; i < labeled.labels.size(); ++i)
        (labeled.labels[i] ? anomalies : normals).push_back(i);

    const auto n_train_norm = static_cast<std::size_t>(std::floor(normal_frac * normals.size()));
    const auto n_train_anom = static_cast<std::size_t>(std::floor(anomaly_frac * anomalies.size()));
    if (n_train_norm < 2 || n_train_anom < 1 || normals.size() - n_train_norm < 1 ||
        anomalies.size() - n_train_anom < 1)
        throw InsufficientData("run_static_experiment: too few rows per class for the split");

    EvalRun run;
    for (int iter = 0; iter < iters; ++iter) {
        Rng rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(iter + 1)));
        const auto train_norm = pick(normals, n_train_norm, rng);
        const auto train_anom = pick(anomalies, n_train_anom, rng);

        std::vector<bool> in_train(labeled.labels.size(), false);
        FeatureTable train;
        train.columns = labeled.columns;
        train.data.resize(0, labeled.data.cols());
        for (auto i : train_norm) {
            in_train[i] = true;
            train.append_row(labeled.data.row(static_cast<Eigen::Index>(i)));
        }
        for (auto i : train_anom) {
            in_train[i] = true;
            train.append_row(labeled.data.row(static_cast<Eigen::Index>(i)));
        }

        auto cfg = config;
        cfg.seed = rng.next_u64();
        const auto det = fit(cfg, train);
        const double contamination =
            static_cast<double>(n_train_anom) / static_cast<double>(train.data.rows());
        const double thr = det->threshold(ThresholdRule::with_contamination(contamination));

        std::vector<double> scores;
        std::vector<bool> pred, truth;
        for (std::size_t i = 0; i < labeled.labels.size(); ++i) {
            if (in_train[i])
                continue;
            const double s = det->score_point(labeled.data.row(static_cast<Eigen::Index>(i)));
            scores.push_back(s);
            pred.push_back(s > thr);
            truth.push_back(labeled.labels[i] != 0);
        }

        IterationMetrics m;
        m.cm = confusion_matrix(pred, truth);
        m.f1 = f1_score(m.cm, &m.degenerate);
        m.pr_auc = pr_auc(scores, truth);
        run.iterations.push_back(m);
    }
    run.aggregate();
    return run;
}

EvalRun run_dynamic_experiment(const FeatureTable& stream, const DetectorConfig& config,
                               int repeats, std::uint64_t seed, int init_n, double dropout,
                               const ThresholdRule& rule) {
    if (repeats < 1)
        throw InvalidConfig("run_dynamic_experiment: repeats must be >= 1");
    if (stream.labels.size() != static_cast<std::size_t>(stream.data.rows()))
        throw InvalidConfig("run_dynamic_experiment: stream is not labeled");
    if (stream.data.rows() <= init_n)
        throw InsufficientData("run_dynamic_experiment: stream shorter than warm-up");

    EvalRun run;
    for (int rep = 0; rep < repeats; ++rep) {
        SlidingWindowOptions opts;
        opts.dropout = dropout;
        opts.dropout_seed = seed ^ (0xd1342543de82ef95ULL * static_cast<std::uint64_t>(rep + 1));
        auto cfg = config;
        cfg.seed = seed + static_cast<std::uint64_t>(rep);
        const auto result = sliding_window_run(stream, cfg, init_n, rule, opts);

        std::vector<double> scores;
        std::vector<bool> pred, truth;
        for (std::size_t i = 0; i < result.samples.size(); ++i) {
            if (result.samples[i].warmup)
                continue;
            scores.push_back(result.samples[i].score);
            pred.push_back(result.samples[i].is_anomaly);
            truth.push_back(stream.labels[i] != 0);
        }

        IterationMetrics m;
        m.cm = confusion_matrix(pred, truth);
        m.f1 = f1_score(m.cm, &m.degenerate);
        m.pr_auc = pr_auc(scores, truth);
        run.iterations.push_back(m);
    }
    run.aggregate();
    return run;
}

} // namespace vibroad
