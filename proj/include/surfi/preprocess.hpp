#pragma once

#include <span>
#include <string>
#include <vector>

#include "surfi/spectral.hpp"
#include "surfi/trace_model.hpp"

namespace surfi {

struct DenoiseConfig {
  std::string wavelet = "db4";  // haar | db2 | db4
  int levels = 4;
};

// Orthonormal scaling filter for a wavelet family id. Throws
// PreconditionError for an unknown id.
std::span<const double> scaling_filter(const std::string& wavelet);

// Multi-level periodized DWT of a signal whose length is a multiple of
// 2^levels. details[0] is the finest level.
struct WaveletCoefficients {
  std::vector<double> approximation;
  std::vector<std::vector<double>> details;
};

WaveletCoefficients wavelet_decompose(std::span<const double> signal, const std::string& wavelet, int levels);
std::vector<double> wavelet_reconstruct(const WaveletCoefficients& coeffs, const std::string& wavelet);

// Universal soft-threshold shrinkage of all detail levels, then the inverse
// transform. Same length, rate and origin as the input.
UniformSeries dwt_denoise(const UniformSeries& series, const DenoiseConfig& cfg = {});

// Denoises every series independently. `threads` <= 1 runs sequentially; the
// output does not depend on the thread count.
std::vector<UniformSeries> dwt_denoise_all(const std::vector<UniformSeries>& series, const DenoiseConfig& cfg,
                                           unsigned threads = 1);

struct KeypointSeriesOptions {
  double max_missing_fraction = 0.5;
  double target_rate = 30.0;  // <= 0 keeps the trace's own frame rate
};

// One mean-subtracted series per usable keypoint axis, ordered by keypoint id
// then x before y. Gaps are linearly interpolated with endpoint hold.
std::vector<UniformSeries> keypoint_series(const KeypointTrace& trace, const KeypointSeriesOptions& opts = {});

struct SeriesSelection {
  std::size_t index = 0;     // position in the candidate list
  double score = 0.0;        // peak magnitude or band energy that won
  bool zero_energy = false;  // every candidate scored 0
};

// Candidate with the largest single half-spectrum magnitude. First wins ties.
SeriesSelection select_video_series(std::span<const UniformSeries> candidates);

inline constexpr FrequencyBand kSelectionBand{0.3, 10.0};

// Column with the largest mean-removed spectral energy in `band`. Lowest
// column wins ties.
SeriesSelection select_csi_subcarrier(std::span<const UniformSeries> columns, FrequencyBand band = kSelectionBand);

}  // namespace surfi
