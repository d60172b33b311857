#pragma once

#include "vibroad/detectors.hpp"

#include <filesystem>

namespace vibroad {

// Versioned binary container for fitted models: magic "VADM", u16 format
// version, algorithm id, then the fitting inputs (config JSON + training
// table). Fitting is deterministic given (config, train, seed), so the
// loaded model reproduces the saved one exactly.
void save_model(const FittedDetector& model, const std::filesystem::path& path);
std::unique_ptr<FittedDetector> load_model(const std::filesystem::path& path);

} // namespace vibroad
