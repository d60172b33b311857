#pragma once

#include "vibroad/features.hpp"
#include "vibroad/signal.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vibroad {

enum class FaultType {
    None,
    OuterRace,
    InnerRace,
    Ball,
    GearStage1,
    GearStage2,
    Unbalance,
    Misalignment,
    Looseness,
};

std::string fault_name(FaultType f);
FaultType fault_from_name(const std::string& name);

struct MachineSpec {
    double fr_hz = 30.0;
    double bpfo_hz = 107.0;
    double bpfi_hz = 162.0;
    double bsf_hz = 71.0;
    double gmf1_hz = 690.0;
    double gmf2_hz = 330.0;
    double resonance_hz = 3000.0;
};

struct SynthFaultSpec {
    std::vector<FaultType> faults; // empty or {None} means healthy
    double severity = 1.0;
    MachineSpec machine;
    double noise_rms = 0.05;
    std::uint64_t seed = 0;
};

// Gaussian noise plus a weak shaft tone; fault signatures added on top,
// scaled by severity. Bearing faults excite a decaying resonance with an
// impulse train (1 % jitter models slip); gear faults place sidebands at
// fr around the mesh frequency; unbalance boosts 1x fr, misalignment
// 2x and 3x fr, looseness harmonics 1-4x fr plus a 0.5x fr subharmonic.
VibrationSignal generate(const SynthFaultSpec& spec, std::size_t n_samples, double sample_rate);

enum class CaseStyle { BearingRunToFailure, GearboxStatic, MechanicalStatic };

struct DatasetParams {
    std::size_t n_rows = 120;
    std::size_t onset_index = 60;      // run-to-failure only
    double max_severity = 1.5;         // severity at the end of the ramp
    std::vector<std::pair<FaultType, std::size_t>> class_counts; // static styles
    std::size_t n_samples = 8192;
    double sample_rate = 12000.0;
    MachineSpec machine;
    double noise_rms = 0.05;
    std::uint64_t seed = 0;
};

struct DatasetTruth {
    std::size_t onset_index = 0;            // run-to-failure
    std::vector<FaultType> row_faults;      // one per row
    std::vector<double> row_severity;
};

// Feature spec matching the generator: band features per fault signature
// tagged specific with the fault label, plus general rms/kurtosis.
FeatureSpec default_feature_spec(const MachineSpec& machine, double sample_rate);

struct SynthDataset {
    FeatureTable table; // labeled 0/1
    FeatureSpec spec;
    DatasetTruth truth;
};

SynthDataset generate_dataset(CaseStyle style, const DatasetParams& params);

} // namespace vibroad
