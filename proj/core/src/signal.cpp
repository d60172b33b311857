#include "vibroad/signal.hpp"

#include "vibroad/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace vibroad {

void VibrationSignal::validate() const {
    if (samples.empty())
        throw InvalidSignal("signal has no samples");
    if (!(sample_rate > 0.0))
        throw InvalidSignal("sample_rate must be positive");
    for (double s : samples)
        if (!std::isfinite(s))
            throw InvalidSignal("signal contains NaN or Inf");
}

std::size_t Spectrum::bin_at(double freq_hz) const {
    if (magnitudes.empty() || df <= 0.0) return 0;
    const auto idx = static_cast<long>(std::llround(freq_hz / df));
    return static_cast<std::size_t>(std::clamp<long>(idx, 0, static_cast<long>(magnitudes.size()) - 1));
}

double Spectrum::peak_freq(double min_hz) const {
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < magnitudes.size(); ++i) {
        if (bin_freqs[i] < min_hz) continue;
        if (magnitudes[i] > best_mag) {
            best_mag = magnitudes[i];
            best = i;
        }
    }
    return bin_freqs[best];
}

namespace fft {

namespace {
// FFTW plan creation is not thread-safe; execution of a plan is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

std::vector<std::complex<double>> run(const std::vector<std::complex<double>>& in, int sign) {
    const auto n = in.size();
    std::vector<std::complex<double>> out(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n),
                                reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                sign, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
    if (sign == FFTW_BACKWARD) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& v : out) v *= scale;
    }
    return out;
}
} // namespace

std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in) {
    return run(in, FFTW_FORWARD);
}

std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& in) {
    return run(in, FFTW_BACKWARD);
}

} // namespace fft

namespace {

Spectrum amplitude_spectrum(const std::vector<double>& samples, double sample_rate, WindowKind window) {
    const std::size_t n = samples.size();
    std::vector<std::complex<double>> buf(n);
    double coherent_gain = 1.0;
    if (window == WindowKind::Hann) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                                  static_cast<double>(n));
            buf[i] = samples[i] * w;
            acc += w;
        }
        coherent_gain = acc / static_cast<double>(n);
    } else {
        for (std::size_t i = 0; i < n; ++i) buf[i] = samples[i];
    }

    const auto freq = fft::forward(buf);

    Spectrum spec;
    spec.df = sample_rate / static_cast<double>(n);
    const std::size_t half = n / 2 + 1; // includes Nyquist bin for even n
    spec.bin_freqs.resize(half);
    spec.magnitudes.resize(half);
    const bool even = (n % 2 == 0);
    for (std::size_t i = 0; i < half; ++i) {
        double mag = std::abs(freq[i]) / static_cast<double>(n);
        const bool interior = i != 0 && !(even && i == half - 1);
        if (interior) mag *= 2.0;
        spec.bin_freqs[i] = static_cast<double>(i) * spec.df;
        spec.magnitudes[i] = mag / coherent_gain;
    }
    return spec;
}

} // namespace

Spectrum compute_spectrum(const VibrationSignal& signal, WindowKind window) {
    signal.validate();
    if (signal.samples.size() < 8)
        throw InvalidSignal("signal shorter than 8 samples");
    return amplitude_spectrum(signal.samples, signal.sample_rate, window);
}

std::vector<double> analytic_envelope(const VibrationSignal& signal, double low_hz, double high_hz) {
    signal.validate();
    const double nyquist = signal.sample_rate / 2.0;
    if (!(low_hz >= 0.0 && low_hz < high_hz && high_hz <= nyquist))
        throw InvalidBand("band must satisfy 0 <= low < high <= sample_rate/2");

    const std::size_t n = signal.samples.size();
    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = signal.samples[i];
    auto freq = fft::forward(buf);

    // Brick-wall band mask on the positive frequencies combined with the
    // analytic-signal construction: positive in-band bins doubled, everything
    // else (negative frequencies, out-of-band, DC) zeroed.
    const double df = signal.sample_rate / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) * df;
        if (i == 0 || f > nyquist || f < low_hz || f > high_hz) {
            freq[i] = 0.0;
        } else {
            freq[i] *= 2.0;
        }
    }

    const auto analytic = fft::inverse(freq);
    std::vector<double> envelope(n);
    for (std::size_t i = 0; i < n; ++i) envelope[i] = std::abs(analytic[i]);
    return envelope;
}

Spectrum envelope_spectrum(const VibrationSignal& signal, double low_hz, double high_hz) {
    const auto envelope = analytic_envelope(signal, low_hz, high_hz);
    return amplitude_spectrum(envelope, signal.sample_rate, WindowKind::Rectangular);
}

double band_energy(const Spectrum& spectrum, double center_hz, double half_width_hz) {
    if (center_hz < 0.0)
        throw InvalidBand("band center must be non-negative");
    if (!(half_width_hz > 0.0))
        throw InvalidBand("band half-width must be positive");
    double energy = 0.0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (std::abs(spectrum.bin_freqs[i] - center_hz) <= half_width_hz)
            energy += spectrum.magnitudes[i] * spectrum.magnitudes[i];
    }
    return energy;
}

} // namespace vibroad
