#include "vibroad/diagnosis.hpp"

#include "vibroad/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace vibroad {

using nlohmann::json;

std::string DiagnosisReport::to_json() const {
    json doc;
    doc["sample_index"] = sample_index;
    doc["detected"] = detected;
    doc["mode"] = mode == DiagnosisMode::UnsupervisedClassification ? "unsupervised_classification"
                                                                    : "root_cause_analysis";
    doc["score"] = score;
    doc["normalized_score"] = normalized_score;
    if (detected) {
        doc["explanation_method"] =
            explanation_method == ExplainMethod::Shapley ? "shapley" : "local_diffi";
    }
    if (fault_label) doc["fault_label"] = *fault_label;
    if (filtered_ranking) {
        doc["ranking"] = json::array();
        for (const auto& e : filtered_ranking->entries)
            doc["ranking"].push_back({{"feature", e.feature}, {"weight", e.weight}});
        if (filtered_ranking->degenerate) doc["degenerate"] = true;
    }
    return doc.dump();
}

ImportanceRanking drop_general(const ImportanceRanking& ranking, const FeatureSpec& spec) {
    for (const auto& e : ranking.entries)
        if (spec.index_of(e.feature) < 0)
            throw InvalidSpec("ranking feature not in spec: " + e.feature);
    ImportanceRanking out = ranking;
    out.entries.clear();
    for (const auto& e : ranking.entries)
        if (spec.is_specific(e.feature)) out.entries.push_back(e);
    if (out.entries.empty())
        throw NoSpecificFeatures("no specific features remain after dropping general ones");
    out.degenerate = std::all_of(out.entries.begin(), out.entries.end(),
                                 [](const RankingEntry& e) { return e.weight == 0.0; });
    return out;
}

std::string classify(const ImportanceRanking& ranking, const FeatureSpec& spec) {
    const ImportanceRanking filtered = drop_general(ranking, spec);
    return spec.fault_label_of(filtered.entries.front().feature);
}

ImportanceRanking root_cause(const ImportanceRanking& ranking, const FeatureSpec& spec) {
    return drop_general(ranking, spec);
}

void validate_mode(DiagnosisMode mode, const FeatureSpec& spec) {
    if (spec.specific_names().empty())
        throw NoSpecificFeatures("diagnosis requires at least one specific feature");
    if (mode == DiagnosisMode::UnsupervisedClassification && !spec.labels_unique())
        throw InvalidConfig(
            "classification mode requires each specific feature to map to a unique fault label; "
            "use root_cause_analysis");
}

DiagnosisReport diagnose(const FittedDetector& detector, const FeatureVector& x,
                         const FeatureSpec& spec, DiagnosisMode mode, ExplainMethod explainer,
                         const ThresholdRule& rule, const ShapleyConfig& shapley_config) {
    validate_mode(mode, spec);

    DiagnosisReport report;
    report.mode = mode;
    report.explanation_method = explainer;
    const ScoredSample decision = detector.decide_with_rule(x, rule);
    report.score = decision.score;
    report.normalized_score = decision.normalized_score;
    report.detected = decision.is_anomaly;
    if (!report.detected)
        return report; // analysis complete for normal samples

    ImportanceRanking ranking = explainer == ExplainMethod::Shapley
                                    ? shapley_importance(detector, x, shapley_config)
                                    : local_diffi(detector, x);
    report.explain_seconds = ranking.elapsed_seconds;
    report.filtered_ranking = drop_general(ranking, spec);
    if (mode == DiagnosisMode::UnsupervisedClassification)
        report.fault_label = spec.fault_label_of(report.filtered_ranking->entries.front().feature);
    return report;
}

} // namespace vibroad
