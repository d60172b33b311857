#pragma once

#include "vibroad/signal.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vibroad {

enum class FeatureKind { TimeStat, BandEnergy };
enum class TimeStatistic { Rms, Kurtosis };
enum class SpectrumBasis { Direct, Envelope };
enum class FeatureTag { General, Specific };

struct FeatureDef {
    std::string name;
    FeatureKind kind = FeatureKind::TimeStat;
    // TimeStat
    TimeStatistic statistic = TimeStatistic::Rms;
    // BandEnergy. half_width_hz <= 0 requests the automatic width:
    // envelope basis: 2 * df * ceil(0.02 * center) (+-2% slip allowance);
    // direct basis: 4 * df (constant-speed harmonic band).
    double center_hz = 0.0;
    double half_width_hz = 0.0;
    SpectrumBasis basis = SpectrumBasis::Direct;
    FeatureTag tag = FeatureTag::General;
    std::string fault_label; // required iff tag == Specific
};

struct FeatureSpec {
    std::vector<FeatureDef> entries;
    // Band-pass applied before envelope analysis for Envelope-basis features.
    // Non-positive values fall back to (0.25, 0.90) * Nyquist at extraction.
    double envelope_low_hz = 0.0;
    double envelope_high_hz = 0.0;

    void validate() const; // unique names, labels on specific entries
    std::size_t size() const { return entries.size(); }
    std::vector<std::string> names() const;
    std::vector<std::string> specific_names() const;
    int index_of(const std::string& name) const; // -1 when absent
    bool is_specific(const std::string& name) const;
    // fault label of a specific feature; empty for general/unknown names
    std::string fault_label_of(const std::string& name) const;
    // true when every specific feature maps to a unique fault label
    bool labels_unique() const;

    static FeatureSpec from_json_file(const std::filesystem::path& path);
    static FeatureSpec from_json(const std::string& text);
    std::string to_json() const;
};

struct FeatureVector {
    std::vector<std::string> names;
    Eigen::RowVectorXd values;

    double at(const std::string& name) const;
};

struct FeatureTable {
    std::vector<std::string> columns;
    Eigen::MatrixXd data;             // one row per observation
    std::vector<int> labels;          // empty, or one 0/1 entry per row

    std::size_t rows() const { return static_cast<std::size_t>(data.rows()); }
    std::size_t cols() const { return columns.size(); }
    bool has_labels() const { return !labels.empty(); }
    FeatureVector row(std::size_t i) const;
    void append_row(const Eigen::RowVectorXd& values, std::optional<int> label = std::nullopt);

    static FeatureTable read_csv(const std::filesystem::path& path);
    void write_csv(const std::filesystem::path& path) const;
};

struct ScalingParams {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd stddev;        // 1.0 where the train column was constant
    std::vector<bool> zero_std;

    Eigen::RowVectorXd apply(const Eigen::RowVectorXd& x) const;
    Eigen::RowVectorXd invert(const Eigen::RowVectorXd& z) const;
};

double rms(const VibrationSignal& signal);
// Population kurtosis m4/m2^2 (non-excess; Gaussian ~ 3).
double kurtosis(const VibrationSignal& signal);

FeatureVector extract(const VibrationSignal& signal, const FeatureSpec& spec);

// Z-score `apply_to` with column statistics of `train`. Constant train
// columns pass through unscaled and are flagged.
std::pair<FeatureTable, ScalingParams> standardize(const FeatureTable& train, const FeatureTable& apply_to);

} // namespace vibroad
