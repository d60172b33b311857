#include "vibroad/features.hpp"

#include "vibroad/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace vibroad {

using nlohmann::json;

void FeatureSpec::validate() const {
    if (entries.empty())
        throw InvalidSpec("feature spec has no entries");
    std::set<std::string> seen;
    for (const auto& def : entries) {
        if (def.name.empty())
            throw InvalidSpec("feature with empty name");
        if (!seen.insert(def.name).second)
            throw InvalidSpec("duplicate feature name: " + def.name);
        if (def.tag == FeatureTag::Specific && def.fault_label.empty())
            throw InvalidSpec("specific feature without fault_label: " + def.name);
        if (def.tag == FeatureTag::General && !def.fault_label.empty())
            throw InvalidSpec("general feature must not carry a fault_label: " + def.name);
        if (def.kind == FeatureKind::BandEnergy && def.center_hz < 0.0)
            throw InvalidSpec("negative band center on " + def.name);
    }
}

std::vector<std::string> FeatureSpec::names() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& def : entries) out.push_back(def.name);
    return out;
}

std::vector<std::string> FeatureSpec::specific_names() const {
    std::vector<std::string> out;
    for (const auto& def : entries)
        if (def.tag == FeatureTag::Specific) out.push_back(def.name);
    return out;
}

int FeatureSpec::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].name == name) return static_cast<int>(i);
    return -1;
}

bool FeatureSpec::is_specific(const std::string& name) const {
    const int i = index_of(name);
    return i >= 0 && entries[static_cast<std::size_t>(i)].tag == FeatureTag::Specific;
}

std::string FeatureSpec::fault_label_of(const std::string& name) const {
    const int i = index_of(name);
    return i >= 0 ? entries[static_cast<std::size_t>(i)].fault_label : std::string{};
}

bool FeatureSpec::labels_unique() const {
    std::set<std::string> labels;
    for (const auto& def : entries) {
        if (def.tag != FeatureTag::Specific) continue;
        if (!labels.insert(def.fault_label).second) return false;
    }
    return !labels.empty();
}

namespace {

FeatureKind kind_from_string(const std::string& s) {
    if (s == "time_stat") return FeatureKind::TimeStat;
    if (s == "band_energy") return FeatureKind::BandEnergy;
    throw InvalidSpec("unknown feature kind: " + s);
}

TimeStatistic stat_from_string(const std::string& s) {
    if (s == "rms") return TimeStatistic::Rms;
    if (s == "kurtosis") return TimeStatistic::Kurtosis;
    throw InvalidSpec("unknown statistic: " + s);
}

SpectrumBasis basis_from_string(const std::string& s) {
    if (s == "direct") return SpectrumBasis::Direct;
    if (s == "envelope") return SpectrumBasis::Envelope;
    throw InvalidSpec("unknown spectrum basis: " + s);
}

} // namespace

FeatureSpec FeatureSpec::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("feature spec is not valid JSON: ") + e.what());
    }
    FeatureSpec spec;
    spec.envelope_low_hz = doc.value("envelope_low_hz", 0.0);
    spec.envelope_high_hz = doc.value("envelope_high_hz", 0.0);
    for (const auto& item : doc.at("features")) {
        FeatureDef def;
        def.name = item.at("name").get<std::string>();
        def.kind = kind_from_string(item.at("kind").get<std::string>());
        if (def.kind == FeatureKind::TimeStat) {
            def.statistic = stat_from_string(item.at("statistic").get<std::string>());
        } else {
            def.center_hz = item.at("center_hz").get<double>();
            def.half_width_hz = item.value("half_width_hz", 0.0);
            def.basis = basis_from_string(item.value("basis", "direct"));
        }
        def.tag = item.at("tag").get<std::string>() == "specific" ? FeatureTag::Specific
                                                                  : FeatureTag::General;
        def.fault_label = item.value("fault_label", "");
        spec.entries.push_back(std::move(def));
    }
    spec.validate();
    return spec;
}

FeatureSpec FeatureSpec::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string FeatureSpec::to_json() const {
    json doc;
    if (envelope_low_hz > 0.0) doc["envelope_low_hz"] = envelope_low_hz;
    if (envelope_high_hz > 0.0) doc["envelope_high_hz"] = envelope_high_hz;
    doc["features"] = json::array();
    for (const auto& def : entries) {
        json item;
        item["name"] = def.name;
        item["kind"] = def.kind == FeatureKind::TimeStat ? "time_stat" : "band_energy";
        if (def.kind == FeatureKind::TimeStat) {
            item["statistic"] = def.statistic == TimeStatistic::Rms ? "rms" : "kurtosis";
        } else {
            item["center_hz"] = def.center_hz;
            if (def.half_width_hz > 0.0) item["half_width_hz"] = def.half_width_hz;
            item["basis"] = def.basis == SpectrumBasis::Direct ? "direct" : "envelope";
        }
        item["tag"] = def.tag == FeatureTag::Specific ? "specific" : "general";
        if (!def.fault_label.empty()) item["fault_label"] = def.fault_label;
        doc["features"].push_back(std::move(item));
    }
    return doc.dump(2);
}

double FeatureVector::at(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return values(static_cast<Eigen::Index>(i));
    throw InvalidSpec("feature not present: " + name);
}

FeatureVector FeatureTable::row(std::size_t i) const {
    FeatureVector v;
    v.names = columns;
    v.values = data.row(static_cast<Eigen::Index>(i));
    return v;
}

void FeatureTable::append_row(const Eigen::RowVectorXd& values, std::optional<int> label) {
    if (data.cols() == 0 && rows() == 0)
        data.resize(0, values.cols());
    if (values.cols() != data.cols())
        throw InvalidSpec("row width does not match table");
    data.conservativeResize(data.rows() + 1, Eigen::NoChange);
    data.row(data.rows() - 1) = values;
    if (label)
        labels.push_back(*label);
    else if (has_labels())
        throw InvalidSpec("labeled table requires a label per row");
}

FeatureTable FeatureTable::read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    FeatureTable table;
    std::string line;
    if (!std::getline(in, line))
        throw IoError("empty feature table: " + path.string());
    std::stringstream header(line);
    std::string cell;
    bool last_is_label = false;
    std::vector<std::string> cols;
    while (std::getline(header, cell, ',')) cols.push_back(cell);
    if (!cols.empty() && cols.back() == "label") {
        last_is_label = true;
        cols.pop_back();
    }
    table.columns = cols;

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        const std::size_t expect = cols.size() + (last_is_label ? 1 : 0);
        if (row.size() != expect)
            throw IoError("ragged row in " + path.string());
        if (last_is_label) {
            table.labels.push_back(static_cast<int>(row.back()));
            row.pop_back();
        }
        rows.push_back(std::move(row));
    }
    table.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            table.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return table;
}

void FeatureTable::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << std::setprecision(17);
    for (std::size_t j = 0; j < columns.size(); ++j)
        out << columns[j] << (j + 1 < columns.size() ? "," : "");
    if (has_labels()) out << ",label";
    out << "\n";
    for (std::size_t i = 0; i < rows(); ++i) {
        for (Eigen::Index j = 0; j < data.cols(); ++j)
            out << data(static_cast<Eigen::Index>(i), j) << (j + 1 < data.cols() ? "," : "");
        if (has_labels()) out << "," << labels[i];
        out << "\n";
    }
}

Eigen::RowVectorXd ScalingParams::apply(const Eigen::RowVectorXd& x) const {
    Eigen::RowVectorXd z = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        if (!zero_std[static_cast<std::size_t>(j)])
            z(j) = (x(j) - mean(j)) / stddev(j);
    return z;
}

Eigen::RowVectorXd ScalingParams::invert(const Eigen::RowVectorXd& z) const {
    Eigen::RowVectorXd x = z;
    for (Eigen::Index j = 0; j < z.cols(); ++j)
        if (!zero_std[static_cast<std::size_t>(j)])
            x(j) = z(j) * stddev(j) + mean(j);
    return x;
}

double rms(const VibrationSignal& signal) {
    signal.validate();
    double acc = 0.0;
    for (double s : signal.samples) acc += s * s;
    return std::sqrt(acc / static_cast<double>(signal.samples.size()));
}

double kurtosis(const VibrationSignal& signal) {
    signal.validate();
    const auto n = signal.samples.size();
    if (n < 4)
        throw DegenerateSignal("kurtosis needs at least 4 samples");
    double mean = 0.0;
    for (double s : signal.samples) mean += s;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m4 = 0.0;
    for (double s : signal.samples) {
        const double d = s - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (m2 <= 0.0)
        throw DegenerateSignal("kurtosis of a constant signal");
    return m4 / (m2 * m2);
}

FeatureVector extract(const VibrationSignal& signal, const FeatureSpec& spec) {
    spec.validate();
    signal.validate();
    const double nyquist = signal.sample_rate / 2.0;
    for (const auto& def : spec.entries)
        if (def.kind == FeatureKind::BandEnergy && def.center_hz >= nyquist)
            throw InvalidSpec("band center above Nyquist: " + def.name);

    bool need_direct = false, need_envelope = false;
    for (const auto& def : spec.entries) {
        if (def.kind != FeatureKind::BandEnergy) continue;
        (def.basis == SpectrumBasis::Direct ? need_direct : need_envelope) = true;
    }

    Spectrum direct, envelope;
    if (need_direct)
        direct = compute_spectrum(signal, WindowKind::Rectangular);
    if (need_envelope) {
        double lo = spec.envelope_low_hz, hi = spec.envelope_high_hz;
        if (!(lo > 0.0 && hi > lo)) {
            lo = 0.25 * nyquist;
            hi = 0.90 * nyquist;
        }
        envelope = envelope_spectrum(signal, lo, hi);
    }

    FeatureVector out;
    out.names = spec.names();
    out.values.resize(static_cast<Eigen::Index>(spec.size()));
    for (std::size_t i = 0; i < spec.entries.size(); ++i) {
        const auto& def = spec.entries[i];
        double value = 0.0;
        if (def.kind == FeatureKind::TimeStat) {
            value = def.statistic == TimeStatistic::Rms ? rms(signal) : kurtosis(signal);
        } else {
            const Spectrum& spectrum = def.basis == SpectrumBasis::Direct ? direct : envelope;
            double half = def.half_width_hz;
            if (half <= 0.0) {
                half = def.basis == SpectrumBasis::Envelope
                           ? 2.0 * spectrum.df * std::ceil(0.02 * def.center_hz)
                           : 4.0 * spectrum.df;
            }
            value = band_energy(spectrum, def.center_hz, half);
        }
        out.values(static_cast<Eigen::Index>(i)) = value;
    }
    return out;
}

std::pair<FeatureTable, ScalingParams> standardize(const FeatureTable& train, const FeatureTable& apply_to) {
    if (train.rows() == 0)
        throw InsufficientData("standardize needs a non-empty training table");
    const Eigen::Index p = train.data.cols();
    ScalingParams params;
    params.mean = train.data.colwise().mean();
    params.stddev.resize(p);
    params.zero_std.assign(static_cast<std::size_t>(p), false);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double var =
            (train.data.col(j).array() - params.mean(j)).square().sum() /
            static_cast<double>(train.rows());
        const double sd = std::sqrt(var);
        if (sd <= 0.0) {
            params.stddev(j) = 1.0;
            params.zero_std[static_cast<std::size_t>(j)] = true;
        } else {
            params.stddev(j) = sd;
        }
    }
    FeatureTable scaled = apply_to;
    for (Eigen::Index i = 0; i < scaled.data.rows(); ++i)
        scaled.data.row(i) = params.apply(apply_to.data.row(i));
    return {std::move(scaled), std::move(params)};
}

} // namespace vibroad
