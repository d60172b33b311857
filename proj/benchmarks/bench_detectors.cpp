#include "vibroad/detectors.hpp"
#include "vibroad/explain.hpp"
#include "vibroad/rng.hpp"

#include <benchmark/benchmark.h>

using namespace vibroad;

namespace {

FeatureTable cloud(std::size_t n, std::size_t dims, std::uint64_t seed) {
    FeatureTable t;
    for (std::size_t j = 0; j < dims; ++j)
        t.columns.push_back("f" + std::to_string(j));
    t.data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims));
    Rng rng(seed);
    for (Eigen::Index i = 0; i < t.data.rows(); ++i)
        for (Eigen::Index j = 0; j < t.data.cols(); ++j)
            t.data(i, j) = rng.normal();
    return t;
}

void bench_fit(benchmark::State& state, Algorithm algorithm) {
    const auto train = cloud(static_cast<std::size_t>(state.range(0)), 8, 1);
    DetectorConfig cfg;
    cfg.algorithm = algorithm;
    for (auto _ : state)
        benchmark::DoNotOptimize(fit(cfg, train));
}

void bench_score(benchmark::State& state, Algorithm algorithm) {
    const auto train = cloud(static_cast<std::size_t>(state.range(0)), 8, 1);
    DetectorConfig cfg;
    cfg.algorithm = algorithm;
    const auto det = fit(cfg, train);
    Eigen::RowVectorXd x = Eigen::RowVectorXd::Constant(8, 2.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(det->score_point(x));
}

} // namespace

#define VIBROAD_BENCH(name, algo)                                              \
    BENCHMARK_CAPTURE(bench_fit, name, algo)->Arg(256)->Arg(1024);             \
    BENCHMARK_CAPTURE(bench_score, name, algo)->Arg(256)->Arg(1024)

VIBROAD_BENCH(knn, Algorithm::Knn);
VIBROAD_BENCH(lof, Algorithm::Lof);
VIBROAD_BENCH(mcd, Algorithm::Mcd);
VIBROAD_BENCH(iforest, Algorithm::IsolationForest);
VIBROAD_BENCH(hbos, Algorithm::Hbos);
VIBROAD_BENCH(loda, Algorithm::Loda);

namespace {

void bench_shapley(benchmark::State& state) {
    const auto train = cloud(256, static_cast<std::size_t>(state.range(0)), 1);
    DetectorConfig cfg;
    const auto det = fit(cfg, train);
    FeatureVector x = train.row(0);
    x.values.setConstant(4.0);
    ShapleyConfig shap;
    for (auto _ : state)
        benchmark::DoNotOptimize(shapley_importance(*det, x, shap));
}

void bench_local_diffi(benchmark::State& state) {
    const auto train = cloud(256, static_cast<std::size_t>(state.range(0)), 1);
    DetectorConfig cfg;
    const auto det = fit(cfg, train);
    FeatureVector x = train.row(0);
    x.values.setConstant(4.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(local_diffi(*det, x));
}

} // namespace

BENCHMARK(bench_shapley)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_local_diffi)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
