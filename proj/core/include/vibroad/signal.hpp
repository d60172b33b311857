#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

namespace vibroad {

// Uniformly sampled acceleration time series.
struct VibrationSignal {
    std::vector<double> samples;
    double sample_rate = 0.0; // Hz
    std::map<std::string, std::string> meta;

    std::size_t size() const { return samples.size(); }
    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }

    // Throws InvalidSignal on empty data, non-positive rate or non-finite samples.
    void validate() const;
};

// One-sided amplitude spectrum: bin_freqs[i] = i * df, df = sample_rate / N.
// A pure tone of amplitude A lands in its bin with magnitude A (up to leakage).
struct Spectrum {
    std::vector<double> bin_freqs;
    std::vector<double> magnitudes;
    double df = 0.0;

    std::size_t size() const { return magnitudes.size(); }
    // Index of the bin nearest to `freq_hz`.
    std::size_t bin_at(double freq_hz) const;
    // Frequency of the largest-magnitude bin at or above `min_hz`.
    double peak_freq(double min_hz = 0.0) const;
};

enum class WindowKind { Rectangular, Hann };

// One-sided amplitude spectrum with coherent-gain correction for the window.
// Interior bins are doubled; DC and Nyquist are not.
Spectrum compute_spectrum(const VibrationSignal& signal, WindowKind window = WindowKind::Rectangular);

// Magnitude spectrum of the analytic-signal envelope of the band-passed input.
// The band-pass is a frequency-domain brick-wall mask applied before the
// analytic-signal construction.
Spectrum envelope_spectrum(const VibrationSignal& signal, double low_hz, double high_hz);

// Sum of squared magnitudes over bins with |freq - center| <= half_width.
// An empty band yields 0.
double band_energy(const Spectrum& spectrum, double center_hz, double half_width_hz);

// Amplitude envelope of the band-passed signal (time domain). Exposed for the
// envelope_spectrum implementation and its tests.
std::vector<double> analytic_envelope(const VibrationSignal& signal, double low_hz, double high_hz);

namespace fft {
// Forward complex DFT, generic length (no zero-padding).
std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in);
std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& in);
} // namespace fft

} // namespace vibroad
