#pragma once

#include "vibroad/signal.hpp"

#include <filesystem>

namespace vibroad {

// CSV: one sample per line, preceded by a `# sample_rate=<Hz>` comment row.
VibrationSignal read_signal_csv(const std::filesystem::path& path);
void write_signal_csv(const VibrationSignal& signal, const std::filesystem::path& path);

// Raw binary: 8-byte header (magic "VIB1", u32 little-endian sample rate)
// followed by little-endian 32-bit floats.
VibrationSignal read_signal_vib1(const std::filesystem::path& path);
void write_signal_vib1(const VibrationSignal& signal, const std::filesystem::path& path);

// Dispatches on extension: ".csv" -> CSV, anything else -> VIB1.
VibrationSignal read_signal(const std::filesystem::path& path);

} // namespace vibroad
