#pragma once

#include "vibroad/features.hpp"
#include "vibroad/rng.hpp"
#include "vibroad/signal.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace testutil {

inline vibroad::VibrationSignal tone(double freq, double amp, std::size_t n, double fs,
                                     double phase = 0.0) {
    vibroad::VibrationSignal s;
    s.sample_rate = fs;
    s.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        s.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq * i / fs + phase);
    return s;
}

inline void add_tone(vibroad::VibrationSignal& s, double freq, double amp, double phase = 0.0) {
    for (std::size_t i = 0; i < s.samples.size(); ++i)
        s.samples[i] += amp * std::sin(2.0 * std::numbers::pi * freq * i / s.sample_rate + phase);
}

inline vibroad::VibrationSignal noise(double rms, std::size_t n, double fs, std::uint64_t seed) {
    vibroad::VibrationSignal s;
    s.sample_rate = fs;
    s.samples.resize(n);
    vibroad::Rng rng(seed);
    for (auto& v : s.samples)
        v = rms * rng.normal();
    return s;
}

// Textbook DFT, O(n^2); the independent reference for the FFT-based path.
inline std::vector<double> naive_dft_magnitudes(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> mags(n / 2 + 1);
    for (std::size_t k = 0; k < mags.size(); ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -2.0 * std::numbers::pi * k * t / n;
            re += x[t] * std::cos(ang);
            im += x[t] * std::sin(ang);
        }
        double mag = std::sqrt(re * re + im * im) / n;
        if (k != 0 && !(n % 2 == 0 && k == n / 2))
            mag *= 2.0;
        mags[k] = mag;
    }
    return mags;
}

// 1-D feature table from a flat list of values.
inline vibroad::FeatureTable table1d(const std::vector<double>& values,
                                     const std::string& name = "x") {
    vibroad::FeatureTable t;
    t.columns = {name};
    t.data.resize(static_cast<Eigen::Index>(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i)
        t.data(static_cast<Eigen::Index>(i), 0) = values[i];
    return t;
}

inline vibroad::FeatureTable table2d(const std::vector<std::pair<double, double>>& points) {
    vibroad::FeatureTable t;
    t.columns = {"x", "y"};
    t.data.resize(static_cast<Eigen::Index>(points.size()), 2);
    for (std::size_t i = 0; i < points.size(); ++i) {
        t.data(static_cast<Eigen::Index>(i), 0) = points[i].first;
        t.data(static_cast<Eigen::Index>(i), 1) = points[i].second;
    }
    return t;
}

inline vibroad::FeatureVector point(const std::vector<std::string>& names,
                                    const std::vector<double>& values) {
    vibroad::FeatureVector v;
    v.names = names;
    v.values.resize(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i)
        v.values(static_cast<Eigen::Index>(i)) = values[i];
    return v;
}

// Gaussian cloud around the origin.
inline vibroad::FeatureTable gaussian_cloud(std::size_t n, std::size_t dims, std::uint64_t seed,
                                            double scale = 1.0) {
    vibroad::FeatureTable t;
    for (std::size_t j = 0; j < dims; ++j)
        t.columns.push_back("f" + std::to_string(j));
    t.data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims));
    vibroad::Rng rng(seed);
    for (Eigen::Index i = 0; i < t.data.rows(); ++i)
        for (Eigen::Index j = 0; j < t.data.cols(); ++j)
            t.data(i, j) = scale * rng.normal();
    return t;
}

} // namespace testutil
