#pragma once

#include <complex>
#include <span>
#include <vector>

#include "surfi/trace_model.hpp"

namespace surfi {

// Forward DFT of a complex sequence, unnormalized: X[k] = sum x[n] e^{-2πikn/N}.
// Any length; radix-2 when N is a power of two, Bluestein otherwise.
void fft_inplace(std::vector<std::complex<double>>& data);
void ifft_inplace(std::vector<std::complex<double>>& data);  // includes the 1/N factor

std::vector<std::complex<double>> real_dft(std::span<const double> samples);

std::size_t next_pow2(std::size_t n);

struct FrequencyBand {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

// |X[k]| for k = 1..floor(n/2). DC is dropped.
std::vector<double> fft_half_magnitudes(std::span<const double> window);

// Sum of squared half-spectrum magnitudes over one window.
double motion_energy(std::span<const double> window);

struct MotionEnergySeries {
  double window_s = 0.1;
  std::vector<double> values;
  double rate = 0.0;  // windows per second
  double t0 = 0.0;
  SeriesOrigin source;

  std::size_t samples_per_window = 0;

  double window_start(std::size_t i) const { return t0 + static_cast<double>(i) / rate; }
  double window_end(std::size_t i) const { return t0 + static_cast<double>(i + 1) / rate; }
};

// Non-overlapping windows of `window_s`; the trailing partial window is
// discarded and each window is mean-removed before its DFT.
MotionEnergySeries motion_energy_series(const UniformSeries& series, double window_s = 0.1);

struct SpectralPeak {
  double frequency = 0.0;
  double magnitude = 0.0;
  double bin_width = 0.0;
};

inline constexpr double kMinPeakSegmentS = 4.0;
inline constexpr double kMaxPeakBinWidthHz = 0.05;

// Mean-removed segment, zero-padded to a power of two with bin width at most
// 0.05 Hz; returns the largest-magnitude bin inside `band` (lowest frequency
// on ties). Throws NoPeakError for a flat segment.
SpectralPeak prominent_frequency(const UniformSeries& segment, FrequencyBand band);

// Frequency-domain mask filter at the natural DFT length: bins outside
// [low, high] are zeroed.
UniformSeries bandpass(const UniformSeries& series, double low_hz, double high_hz);

// Sum of |X[k]|^2 over bins 1..floor(n/2) whose frequency lies in `band`,
// after mean removal.
double band_energy(std::span<const double> samples, double rate, FrequencyBand band);

}  // namespace surfi
