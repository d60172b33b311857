#include "vibroad/synth.hpp"

#include "vibroad/errors.hpp"
#include "vibroad/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vibroad {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void add_tone(std::vector<double>& x, double fs, double freq, double amp, double phase) {
    for (std::size_t n = 0; n < x.size(); ++n)
        x[n] += amp * std::sin(kTwoPi * freq * n / fs + phase);
}

// Impulse train at `rate` exciting a decaying resonance. 1 % inter-arrival
// jitter models roller slip.
void add_impulses(std::vector<double>& x, double fs, double rate, double resonance, double amp,
                  Rng& rng) {
    const double period = 1.0 / rate;
    const double tau = period / 8.0; // rings down well before the next hit
    double t = rng.uniform(0.0, period);
    const double duration = x.size() / fs;
    while (t < duration) {
        const auto n0 = static_cast<std::size_t>(std::ceil(t * fs));
        for (std::size_t n = n0; n < x.size(); ++n) {
            const double dt = n / fs - t;
            const double env = std::exp(-dt / tau);
            if (env < 1e-4)
                break;
            x[n] += amp * env * std::sin(kTwoPi * resonance * dt);
        }
        t += period * (1.0 + 0.01 * rng.normal());
    }
}

void check_below_nyquist(double freq, double nyquist, const char* what) {
    if (freq <= 0.0 || freq >= nyquist)
        throw InvalidSpec(std::string(what) + " frequency outside (0, Nyquist)");
}

} // namespace

std::string fault_name(FaultType f) {
    switch (f) {
    case FaultType::None: return "none";
    case FaultType::OuterRace: return "outer_race";
    case FaultType::InnerRace: return "inner_race";
    case FaultType::Ball: return "ball";
    case FaultType::GearStage1: return "gear_stage1";
    case FaultType::GearStage2: return "gear_stage2";
    case FaultType::Unbalance: return "unbalance";
    case FaultType::Misalignment: return "misalignment";
    case FaultType::Looseness: return "looseness";
    }
    return "none";
}

FaultType fault_from_name(const std::string& name) {
    for (auto f : {FaultType::None, FaultType::OuterRace, FaultType::InnerRace, FaultType::Ball,
                   FaultType::GearStage1, FaultType::GearStage2, FaultType::Unbalance,
                   FaultType::Misalignment, FaultType::Looseness})
        if (fault_name(f) == name)
            return f;
    throw InvalidSpec("unknown fault type: " + name);
}

VibrationSignal generate(const SynthFaultSpec& spec, std::size_t n_samples, double sample_rate) {
    if (n_samples < 8 || sample_rate <= 0.0)
        throw InvalidSpec("generate: need >= 8 samples and a positive sample rate");
    if (spec.noise_rms <= 0.0)
        throw InvalidSpec("generate: noise_rms must be positive");
    const double nyquist = sample_rate / 2.0;
    const auto& m = spec.machine;
    check_below_nyquist(m.fr_hz, nyquist, "shaft");

    Rng rng(spec.seed);
    std::vector<double> x(n_samples, 0.0);
    for (auto& v : x)
        v = spec.noise_rms * rng.normal();
    add_tone(x, sample_rate, m.fr_hz, 0.1, rng.uniform(0.0, kTwoPi));

    const double s = spec.severity;
    for (auto fault : spec.faults) {
        switch (fault) {
        case FaultType::None:
            break;
        case FaultType::OuterRace:
            check_below_nyquist(m.bpfo_hz, nyquist, "outer-race");
            check_below_nyquist(m.resonance_hz, nyquist, "resonance");
            add_impulses(x, sample_rate, m.bpfo_hz, m.resonance_hz, 1.0 * s, rng);
            break;
        case FaultType::InnerRace:
            check_below_nyquist(m.bpfi_hz, nyquist, "inner-race");
            check_below_nyquist(m.resonance_hz, nyquist, "resonance");
            add_impulses(x, sample_rate, m.bpfi_hz, m.resonance_hz, 1.0 * s, rng);
            break;
        case FaultType::Ball:
            check_below_nyquist(m.bsf_hz, nyquist, "ball-spin");
            check_below_nyquist(m.resonance_hz, nyquist, "resonance");
            add_impulses(x, sample_rate, m.bsf_hz, m.resonance_hz, 1.0 * s, rng);
            break;
        case FaultType::GearStage1:
            check_below_nyquist(m.gmf1_hz + m.fr_hz, nyquist, "stage-1 mesh");
            add_tone(x, sample_rate, m.gmf1_hz, 0.3 * s, rng.uniform(0.0, kTwoPi));
            add_tone(x, sample_rate, m.gmf1_hz - m.fr_hz, 0.2 * s, rng.uniform(0.0, kTwoPi));
            add_tone(x, sample_rate, m.gmf1_hz + m.fr_hz, 0.2 * s, rng.uniform(0.0, kTwoPi));
            break;
        case FaultType::GearStage2:
            check_below_nyquist(m.gmf2_hz + m.fr_hz, nyquist, "stage-2 mesh");
            add_tone(x, sample_rate, m.gmf2_hz, 0.3 * s, rng.uniform(0.0, kTwoPi));
            add_tone(x, sample_rate, m.gmf2_hz - m.fr_hz, 0.2 * s, rng.uniform(0.0, kTwoPi));
            add_tone(x, sample_rate, m.gmf2_hz + m.fr_hz, 0.2 * s, rng.uniform(0.0, kTwoPi));
            break;
        case FaultType::Unbalance:
            add_tone(x, sample_rate, m.fr_hz, 0.5 * s, rng.uniform(0.0, kTwoPi));
            break;
        case FaultType::Misalignment:
            check_below_nyquist(3.0 * m.fr_hz, nyquist, "3x shaft");
            add_tone(x, sample_rate, 2.0 * m.fr_hz, 0.4 * s, rng.uniform(0.0, kTwoPi));
            add_tone(x, sample_rate, 3.0 * m.fr_hz, 0.3 * s, rng.uniform(0.0, kTwoPi));
            break;
        case FaultType::Looseness:
            check_below_nyquist(4.0 * m.fr_hz, nyquist, "4x shaft");
            add_tone(x, sample_rate, 0.5 * m.fr_hz, 0.4 * s, rng.uniform(0.0, kTwoPi));
            add_tone(x, sample_rate, 1.0 * m.fr_hz, 0.15 * s, rng.uniform(0.0, kTwoPi));
            add_tone(x, sample_rate, 2.0 * m.fr_hz, 0.12 * s, rng.uniform(0.0, kTwoPi));
            add_tone(x, sample_rate, 3.0 * m.fr_hz, 0.10 * s, rng.uniform(0.0, kTwoPi));
            add_tone(x, sample_rate, 4.0 * m.fr_hz, 0.08 * s, rng.uniform(0.0, kTwoPi));
            break;
        }
    }

    VibrationSignal out;
    out.samples = std::move(x);
    out.sample_rate = sample_rate;
    return out;
}

FeatureSpec default_feature_spec(const MachineSpec& m, double sample_rate) {
    const double nyquist = sample_rate / 2.0;
    FeatureSpec spec;
    auto band = [&](const std::string& name, double center, SpectrumBasis basis,
                    const std::string& label) {
        FeatureDef d;
        d.name = name;
        d.kind = FeatureKind::BandEnergy;
        d.center_hz = center;
        d.basis = basis;
        if (!label.empty()) {
            d.tag = FeatureTag::Specific;
            d.fault_label = label;
        }
        spec.entries.push_back(d);
    };

    FeatureDef rms_def;
    rms_def.name = "rms";
    rms_def.kind = FeatureKind::TimeStat;
    rms_def.statistic = TimeStatistic::Rms;
    spec.entries.push_back(rms_def);
    FeatureDef kurt_def = rms_def;
    kurt_def.name = "kurtosis";
    kurt_def.statistic = TimeStatistic::Kurtosis;
    spec.entries.push_back(kurt_def);

    band("env_bpfo", m.bpfo_hz, SpectrumBasis::Envelope, "outer race");
    band("env_bpfi", m.bpfi_hz, SpectrumBasis::Envelope, "inner race");
    band("env_bsf", m.bsf_hz, SpectrumBasis::Envelope, "ball");
    if (m.gmf1_hz < nyquist)
        band("gmf1", m.gmf1_hz, SpectrumBasis::Direct, "gear stage 1");
    if (m.gmf2_hz < nyquist)
        band("gmf2", m.gmf2_hz, SpectrumBasis::Direct, "gear stage 2");
    band("1xfr", m.fr_hz, SpectrumBasis::Direct, "unbalance");
    band("2xfr", 2.0 * m.fr_hz, SpectrumBasis::Direct, "misalignment 2x");
    band("3xfr", 3.0 * m.fr_hz, SpectrumBasis::Direct, "misalignment 3x");
    band("05xfr", 0.5 * m.fr_hz, SpectrumBasis::Direct, "looseness");
    spec.validate();
    return spec;
}

SynthDataset generate_dataset(CaseStyle style, const DatasetParams& params) {
    if (params.n_rows == 0)
        throw InvalidSpec("generate_dataset: n_rows must be positive");

    SynthDataset out;
    out.spec = default_feature_spec(params.machine, params.sample_rate);

    // Resolve the per-row fault schedule.
    std::vector<FaultType> schedule;
    std::vector<double> severities;
    Rng rng(params.seed);
    if (style == CaseStyle::BearingRunToFailure) {
        if (params.onset_index >= params.n_rows)
            throw InvalidSpec("generate_dataset: onset_index must fall inside the stream");
        out.truth.onset_index = params.onset_index;
        const auto n_fault = params.n_rows - params.onset_index;
        for (std::size_t i = 0; i < params.n_rows; ++i) {
            if (i < params.onset_index) {
                schedule.push_back(FaultType::None);
                severities.push_back(0.0);
            } else {
                schedule.push_back(FaultType::OuterRace);
                const double progress =
                    n_fault > 1 ? static_cast<double>(i - params.onset_index) / (n_fault - 1) : 1.0;
                severities.push_back(params.max_severity * (0.25 + 0.75 * progress));
            }
        }
    } else {
        auto counts = params.class_counts;
        if (counts.empty()) {
            if (style == CaseStyle::GearboxStatic)
                counts = {{FaultType::None, 104},
                          {FaultType::GearStage1, 104},
                          {FaultType::GearStage2, 104}};
            else
                counts = {{FaultType::None, 50},
                          {FaultType::Unbalance, 50},
                          {FaultType::Misalignment, 25}};
        }
        for (const auto& [fault, count] : counts)
            for (std::size_t i = 0; i < count; ++i) {
                schedule.push_back(fault);
                severities.push_back(fault == FaultType::None
                                         ? 0.0
                                         : params.max_severity * rng.uniform(0.8, 1.2));
            }
        // Seeded shuffle so the static rows have no class ordering.
        for (std::size_t i = schedule.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform_int(i));
            std::swap(schedule[i - 1], schedule[j]);
            std::swap(severities[i - 1], severities[j]);
        }
    }

    out.table.columns = out.spec.names();
    out.table.data.resize(0, static_cast<Eigen::Index>(out.table.columns.size()));
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        SynthFaultSpec row_spec;
        if (schedule[i] != FaultType::None)
            row_spec.faults = {schedule[i]};
        row_spec.severity = severities[i];
        row_spec.machine = params.machine;
        row_spec.noise_rms = params.noise_rms;
        row_spec.seed = rng.next_u64();
        const auto signal = generate(row_spec, params.n_samples, params.sample_rate);
        const auto features = extract(signal, out.spec);
        out.table.append_row(features.values, schedule[i] == FaultType::None ? 0 : 1);
        out.truth.row_faults.push_back(schedule[i]);
        out.truth.row_severity.push_back(severities[i]);
    }
    return out;
}

} // namespace vibroad
