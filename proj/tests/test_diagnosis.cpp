#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "vibroad/diagnosis.hpp"
#include "vibroad/errors.hpp"

#include <nlohmann/json.hpp>

using namespace vibroad;
using testutil::point;

namespace {

FeatureSpec bearing_spec() {
    FeatureSpec spec;
    auto stat = [&](const std::string& name, TimeStatistic s) {
        FeatureDef d;
        d.name = name;
        d.kind = FeatureKind::TimeStat;
        d.statistic = s;
        spec.entries.push_back(d);
    };
    auto band = [&](const std::string& name, double center, const std::string& label) {
        FeatureDef d;
        d.name = name;
        d.kind = FeatureKind::BandEnergy;
        d.center_hz = center;
        d.basis = SpectrumBasis::Envelope;
        d.tag = FeatureTag::Specific;
        d.fault_label = label;
        spec.entries.push_back(d);
    };
    stat("rms", TimeStatistic::Rms);
    band("BPFO", 107.0, "outer race");
    band("BPFI", 162.0, "inner race");
    stat("kurtosis", TimeStatistic::Kurtosis);
    band("BSF", 71.0, "ball");
    return spec;
}

ImportanceRanking ranking_of(const std::vector<std::pair<std::string, double>>& entries) {
    ImportanceRanking r;
    for (const auto& [name, weight] : entries)
        r.entries.push_back({name, weight});
    return r;
}

} // namespace

TEST_CASE("drop_general keeps only specific features in order") {
    const auto spec = bearing_spec();
    const auto r = ranking_of(
        {{"rms", 5.0}, {"BPFO", 4.0}, {"BPFI", 3.0}, {"kurtosis", 2.0}, {"BSF", 1.0}});
    const auto filtered = drop_general(r, spec);
    REQUIRE(filtered.entries.size() == 3);
    CHECK(filtered.entries[0].feature == "BPFO");
    CHECK(filtered.entries[1].feature == "BPFI");
    CHECK(filtered.entries[2].feature == "BSF");
}

TEST_CASE("drop_general with no specific features left throws") {
    const auto spec = bearing_spec();
    const auto r = ranking_of({{"rms", 2.0}, {"kurtosis", 1.0}});
    CHECK_THROWS_AS(drop_general(r, spec), NoSpecificFeatures);
}

TEST_CASE("drop_general on an all-specific ranking is the identity") {
    const auto spec = bearing_spec();
    const auto r = ranking_of({{"BPFO", 3.0}, {"BPFI", 2.0}, {"BSF", 1.0}});
    const auto filtered = drop_general(r, spec);
    REQUIRE(filtered.entries.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(filtered.entries[i].feature == r.entries[i].feature);
        CHECK(filtered.entries[i].weight == doctest::Approx(r.entries[i].weight));
    }
}

TEST_CASE("drop_general rejects names missing from the spec") {
    const auto spec = bearing_spec();
    CHECK_THROWS_AS(drop_general(ranking_of({{"mystery", 1.0}}), spec), InvalidSpec);
}

TEST_CASE("classify returns the top specific feature's fault label") {
    const auto spec = bearing_spec();
    const auto r = ranking_of(
        {{"rms", 5.0}, {"BPFO", 4.0}, {"BPFI", 3.0}, {"kurtosis", 2.0}, {"BSF", 1.0}});
    CHECK(classify(r, spec) == "outer race");
}

TEST_CASE("classify ties keep the ranking's own order") {
    const auto spec = bearing_spec();
    // Equal weights: the filter preserves the incoming order, so the first
    // listed specific feature wins.
    const auto r = ranking_of({{"BSF", 2.0}, {"BPFI", 2.0}, {"BPFO", 2.0}});
    CHECK(classify(r, spec) == "ball");
}

TEST_CASE("root cause returns the full filtered ranking") {
    const auto spec = bearing_spec();
    const auto r = ranking_of(
        {{"BPFI", 9.0}, {"rms", 8.0}, {"BSF", 2.0}, {"kurtosis", 1.5}, {"BPFO", 1.0}});
    const auto rc = root_cause(r, spec);
    REQUIRE(rc.entries.size() == 3);
    CHECK(rc.entries[0].feature == "BPFI");
    CHECK(rc.entries[1].feature == "BSF");
    CHECK(rc.entries[2].feature == "BPFO");
    // Consistency of the two procedures.
    CHECK(classify(r, spec) == spec.fault_label_of(rc.entries[0].feature));
}

TEST_CASE("all-zero weights flag the filtered ranking degenerate") {
    const auto spec = bearing_spec();
    const auto rc =
        root_cause(ranking_of({{"BPFO", 0.0}, {"BPFI", 0.0}, {"BSF", 0.0}}), spec);
    CHECK(rc.degenerate);
}

TEST_CASE("drop_general followed by sorting is idempotent") {
    const auto spec = bearing_spec();
    const auto r = ranking_of(
        {{"BPFI", 9.0}, {"rms", 8.0}, {"BSF", 2.0}, {"kurtosis", 1.5}, {"BPFO", 1.0}});
    const auto once = drop_general(r, spec);
    const auto twice = drop_general(once, spec);
    REQUIRE(once.entries.size() == twice.entries.size());
    for (std::size_t i = 0; i < once.entries.size(); ++i)
        CHECK(once.entries[i].feature == twice.entries[i].feature);
}

TEST_CASE("mode validation enforces unique labels for classification") {
    auto spec = bearing_spec();
    CHECK_NOTHROW(validate_mode(DiagnosisMode::UnsupervisedClassification, spec));
    CHECK_NOTHROW(validate_mode(DiagnosisMode::RootCauseAnalysis, spec));

    // Two features sharing a label force root-cause analysis.
    spec.entries[2].fault_label = "outer race";
    CHECK_THROWS_AS(validate_mode(DiagnosisMode::UnsupervisedClassification, spec),
                    InvalidConfig);
    CHECK_NOTHROW(validate_mode(DiagnosisMode::RootCauseAnalysis, spec));

    // No specific features at all.
    FeatureSpec bare;
    FeatureDef d;
    d.name = "rms";
    d.kind = FeatureKind::TimeStat;
    bare.entries.push_back(d);
    CHECK_THROWS_AS(validate_mode(DiagnosisMode::RootCauseAnalysis, bare), NoSpecificFeatures);
}

TEST_CASE("diagnose short-circuits normal samples") {
    const auto spec = bearing_spec();
    auto cloud = testutil::gaussian_cloud(100, 5, 7);
    cloud.columns = spec.names();
    DetectorConfig cfg;
    cfg.algorithm = Algorithm::IsolationForest;
    cfg.seed = 3;
    const auto det = fit(cfg, cloud);

    const auto normal = point(spec.names(), {0.0, 0.1, -0.1, 0.05, 0.0});
    const auto report = diagnose(*det, normal, spec, DiagnosisMode::UnsupervisedClassification,
                                 ExplainMethod::LocalDiffi, ThresholdRule::max_train());
    CHECK_FALSE(report.detected);
    CHECK_FALSE(report.fault_label.has_value());
    CHECK_FALSE(report.filtered_ranking.has_value());
}

TEST_CASE("diagnose labels a bpfo-displaced anomaly as outer race") {
    const auto spec = bearing_spec();
    auto cloud = testutil::gaussian_cloud(100, 5, 7);
    cloud.columns = spec.names();
    DetectorConfig cfg;
    cfg.algorithm = Algorithm::IsolationForest;
    cfg.seed = 3;
    const auto det = fit(cfg, cloud);

    // Impacts raise the general levels too; the BPFO band carries the
    // dominant displacement so the filtered ranking should lead with it.
    const auto anomaly = point(spec.names(), {6.0, 25.0, 0.0, 6.0, 0.0});
    const auto report =
        diagnose(*det, anomaly, spec, DiagnosisMode::UnsupervisedClassification,
                 ExplainMethod::LocalDiffi, ThresholdRule::with_contamination(0.05));
    CHECK(report.detected);
    REQUIRE(report.fault_label.has_value());
    CHECK(*report.fault_label == "outer race");
    REQUIRE(report.filtered_ranking.has_value());
    for (const auto& e : report.filtered_ranking->entries)
        CHECK(spec.is_specific(e.feature));
}

TEST_CASE("diagnose rejects local diffi on a non-forest detector") {
    const auto spec = bearing_spec();
    auto cloud = testutil::gaussian_cloud(60, 5, 7);
    cloud.columns = spec.names();
    DetectorConfig cfg;
    cfg.algorithm = Algorithm::Knn;
    cfg.knn_k = 3;
    const auto det = fit(cfg, cloud);
    const auto anomaly = point(spec.names(), {0.0, 25.0, 0.0, 0.0, 0.0});
    CHECK_THROWS_AS(diagnose(*det, anomaly, spec, DiagnosisMode::RootCauseAnalysis,
                             ExplainMethod::LocalDiffi, ThresholdRule::max_train()),
                    WrongAlgorithm);
}

TEST_CASE("diagnose in classification mode requires unique labels") {
    auto spec = bearing_spec();
    spec.entries[2].fault_label = "outer race"; // duplicate label
    auto cloud = testutil::gaussian_cloud(60, 5, 7);
    cloud.columns = spec.names();
    DetectorConfig cfg;
    cfg.algorithm = Algorithm::IsolationForest;
    const auto det = fit(cfg, cloud);
    const auto anomaly = point(spec.names(), {0.0, 25.0, 0.0, 0.0, 0.0});
    CHECK_THROWS_AS(diagnose(*det, anomaly, spec, DiagnosisMode::UnsupervisedClassification,
                             ExplainMethod::LocalDiffi, ThresholdRule::max_train()),
                    InvalidConfig);
}

TEST_CASE("diagnosis reports serialize deterministically") {
    const auto spec = bearing_spec();
    auto cloud = testutil::gaussian_cloud(100, 5, 7);
    cloud.columns = spec.names();
    DetectorConfig cfg;
    cfg.algorithm = Algorithm::IsolationForest;
    cfg.seed = 3;
    const auto det = fit(cfg, cloud);
    const auto anomaly = point(spec.names(), {0.0, 25.0, 0.0, 0.0, 0.0});

    ShapleyConfig shap;
    shap.seed = 11;
    const auto r1 = diagnose(*det, anomaly, spec, DiagnosisMode::RootCauseAnalysis,
                             ExplainMethod::Shapley, ThresholdRule::max_train(), shap);
    const auto r2 = diagnose(*det, anomaly, spec, DiagnosisMode::RootCauseAnalysis,
                             ExplainMethod::Shapley, ThresholdRule::max_train(), shap);
    CHECK(r1.to_json() == r2.to_json());
}
