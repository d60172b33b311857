#pragma once

#include "vibroad/explain.hpp"
#include "vibroad/features.hpp"

#include <optional>
#include <string>

namespace vibroad {

enum class DiagnosisMode { UnsupervisedClassification, RootCauseAnalysis };

struct DiagnosisReport {
    int sample_index = -1;
    bool detected = false;
    DiagnosisMode mode = DiagnosisMode::RootCauseAnalysis;
    std::optional<std::string> fault_label;                // classification only
    std::optional<ImportanceRanking> filtered_ranking;     // specific features only
    ExplainMethod explanation_method = ExplainMethod::Shapley;
    double score = 0.0;
    double normalized_score = 0.0;
    double explain_seconds = 0.0;

    std::string to_json() const;
};

// Restrict a ranking to specific-tagged features, preserving relative order.
ImportanceRanking drop_general(const ImportanceRanking& ranking, const FeatureSpec& spec);

// Fault label of the top-ranked specific feature.
std::string classify(const ImportanceRanking& ranking, const FeatureSpec& spec);

// The full filtered ranking, for specialist review.
ImportanceRanking root_cause(const ImportanceRanking& ranking, const FeatureSpec& spec);

// Throws InvalidConfig when classification is requested but the spec's
// specific features do not map to unique fault labels.
void validate_mode(DiagnosisMode mode, const FeatureSpec& spec);

DiagnosisReport diagnose(const FittedDetector& detector, const FeatureVector& x,
                         const FeatureSpec& spec, DiagnosisMode mode, ExplainMethod explainer,
                         const ThresholdRule& rule, const ShapleyConfig& shapley_config = {});

} // namespace vibroad
