#include "vibroad/explain.hpp"

#include "vibroad/errors.hpp"
#include "vibroad/iforest.hpp"
#include "vibroad/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

namespace vibroad {

using nlohmann::json;

std::vector<std::string> ImportanceRanking::feature_order() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.feature);
    return out;
}

std::string ImportanceRanking::to_json() const {
    json doc;
    doc["method"] = method == ExplainMethod::Shapley ? "shapley" : "local_diffi";
    doc["ranking"] = json::array();
    for (const auto& e : entries)
        doc["ranking"].push_back({{"feature", e.feature}, {"weight", e.weight}});
    if (method == ExplainMethod::Shapley)
        doc["additivity_residual"] = additivity_residual;
    if (degenerate) doc["degenerate"] = true;
    if (inlier_flagged) doc["inlier"] = true;
    return doc.dump(2);
}

namespace {

// Sort descending by weight; equal weights keep declaration order.
void sort_ranking(std::vector<RankingEntry>& entries) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const RankingEntry& a, const RankingEntry& b) { return a.weight > b.weight; });
}

bool all_zero(const std::vector<RankingEntry>& entries) {
    return std::all_of(entries.begin(), entries.end(),
                       [](const RankingEntry& e) { return e.weight == 0.0; });
}

long factorial_capped(int p, long cap) {
    long f = 1;
    for (int i = 2; i <= p; ++i) {
        f *= i;
        if (f >= cap) return cap;
    }
    return f;
}

} // namespace

ImportanceRanking shapley_importance(const ScoreFn& score_fn,
                                     const std::vector<std::string>& feature_names,
                                     const Eigen::RowVectorXd& x,
                                     const Eigen::MatrixXd& background,
                                     const ShapleyConfig& config) {
    if (config.n_permutations < 1)
        throw InvalidConfig("n_permutations must be >= 1");
    if (background.rows() < 1 || background.cols() != x.cols())
        throw InvalidConfig("background shape does not match the sample");
    const auto start = std::chrono::steady_clock::now();

    const int p = static_cast<int>(x.cols());
    const auto b = static_cast<double>(background.rows());
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(p);

    double baseline = 0.0;
    for (Eigen::Index r = 0; r < background.rows(); ++r) baseline += score_fn(background.row(r));
    baseline /= b;

    auto accumulate_permutation = [&](const std::vector<int>& perm) {
        for (Eigen::Index r = 0; r < background.rows(); ++r) {
            Eigen::RowVectorXd z = background.row(r);
            double prev = score_fn(z);
            for (int f : perm) {
                z(f) = x(f);
                const double cur = score_fn(z);
                phi(f) += cur - prev;
                prev = cur;
            }
        }
    };

    long n_done = 0;
    const long total_perms = factorial_capped(p, static_cast<long>(config.n_permutations) + 1);
    if (total_perms <= config.n_permutations) {
        // Small feature count: enumerate every ordering once, exact values.
        std::vector<int> perm(static_cast<std::size_t>(p));
        std::iota(perm.begin(), perm.end(), 0);
        do {
            accumulate_permutation(perm);
            ++n_done;
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        // Antithetic sampling: each drawn ordering is paired with its reverse.
        Rng rng(config.seed ^ 0x53484150ULL);
        std::vector<int> perm(static_cast<std::size_t>(p));
        std::iota(perm.begin(), perm.end(), 0);
        while (n_done < config.n_permutations) {
            for (int i = 0; i < p - 1; ++i) {
                const auto j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(p - i)));
                std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
            }
            accumulate_permutation(perm);
            ++n_done;
            if (n_done < config.n_permutations) {
                std::reverse(perm.begin(), perm.end());
                accumulate_permutation(perm);
                ++n_done;
            }
        }
    }
    phi /= static_cast<double>(n_done) * b;

    ImportanceRanking out;
    out.method = ExplainMethod::Shapley;
    out.additivity_residual = std::abs(phi.sum() - (score_fn(x) - baseline));
    out.entries.reserve(static_cast<std::size_t>(p));
    for (int f = 0; f < p; ++f)
        out.entries.push_back({feature_names[static_cast<std::size_t>(f)], std::abs(phi(f))});
    sort_ranking(out.entries);
    out.degenerate = all_zero(out.entries);
    out.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

ImportanceRanking shapley_importance(const FittedDetector& detector, const FeatureVector& x,
                                     const ShapleyConfig& config) {
    const FeatureTable& train = detector.train_table();
    Eigen::MatrixXd background;
    if (config.background == ShapleyConfig::Background::TrainingMeans) {
        background = train.data.colwise().mean();
    } else {
        const auto n = static_cast<int>(train.rows());
        const int rows = std::min(config.background_rows, n);
        Rng rng(config.seed ^ 0x42414B47ULL);
        std::vector<int> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        for (int i = 0; i < rows; ++i) {
            const auto j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - i)));
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
        background.resize(rows, train.data.cols());
        for (int i = 0; i < rows; ++i)
            background.row(i) = train.data.row(idx[static_cast<std::size_t>(i)]);
    }
    const ScoreFn fn = [&detector](const Eigen::RowVectorXd& z) { return detector.score_point(z); };
    return shapley_importance(fn, detector.columns(), x.values, background, config);
}

ImportanceRanking local_diffi(const FittedDetector& detector, const FeatureVector& x) {
    const auto* forest = dynamic_cast<const IsolationForestDetector*>(&detector);
    if (!forest)
        throw WrongAlgorithm("local_diffi requires an isolation forest");
    if (x.names != detector.columns())
        throw InvalidSpec("feature vector columns do not match detector");
    const auto start = std::chrono::steady_clock::now();

    const int p = static_cast<int>(x.values.cols());
    const double h_max = static_cast<double>(forest->height_limit() + 1);
    Eigen::VectorXd intensity = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd counter = Eigen::VectorXd::Zero(p);

    std::vector<int> path_features;
    for (const auto& tree : forest->trees()) {
        path_features.clear();
        int depth = 0;
        forest->path_length(tree, x.values, &path_features, &depth);
        if (depth == 0) continue;
        const double delta = 1.0 / static_cast<double>(depth) - 1.0 / h_max;
        for (int f : path_features) {
            intensity(f) += delta;
            counter(f) += 1.0;
        }
    }

    ImportanceRanking out;
    out.method = ExplainMethod::LocalDiffi;
    out.entries.reserve(static_cast<std::size_t>(p));
    for (int f = 0; f < p; ++f) {
        const double weight = counter(f) > 0.0 ? intensity(f) / counter(f) : 0.0;
        out.entries.push_back({detector.columns()[static_cast<std::size_t>(f)], weight});
    }
    sort_ranking(out.entries);
    out.degenerate = all_zero(out.entries);
    out.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

double kendall_tau_distance(const ImportanceRanking& a, const ImportanceRanking& b) {
    if (a.entries.size() != b.entries.size())
        throw IncomparableRankings("rankings cover different feature counts");
    std::vector<std::string> features;
    std::vector<int> pos_a, pos_b;
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        features.push_back(a.entries[i].feature);
        pos_a.push_back(static_cast<int>(i));
        int found = -1;
        for (std::size_t j = 0; j < b.entries.size(); ++j)
            if (b.entries[j].feature == a.entries[i].feature) {
                found = static_cast<int>(j);
                break;
            }
        if (found < 0)
            throw IncomparableRankings("rankings cover different feature sets");
        pos_b.push_back(found);
    }
    const std::size_t n = features.size();
    if (n < 2) return 0.0;
    std::size_t discordant = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if ((pos_a[i] < pos_a[j]) != (pos_b[i] < pos_b[j])) ++discordant;
    return static_cast<double>(discordant) / (static_cast<double>(n * (n - 1)) / 2.0);
}

} // namespace vibroad
