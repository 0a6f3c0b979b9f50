#include "surfi/preprocess.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <optional>
#include <thread>

#include "surfi/error.hpp"

namespace surfi {

namespace {

constexpr std::array<double, 2> kHaar{0.7071067811865476, 0.7071067811865476};
constexpr std::array<double, 4> kDb2{0.48296291314453416, 0.8365163037378079, 0.2241438680420134,
                                     -0.12940952255126037};
constexpr std::array<double, 8> kDb4{0.2303778133088965,   0.7148465705529157,  0.6308807679298589,
                                     -0.027983769416859854, -0.18703481171909309, 0.030841381835560764,
                                     0.0328830116668852,   -0.010597401785069032};

std::vector<double> wavelet_filter(std::span<const double> h) {
  const std::size_t len = h.size();
  std::vector<double> g(len);
  for (std::size_t k = 0; k < len; ++k) g[k] = (k % 2 == 0 ? 1.0 : -1.0) * h[len - 1 - k];
  return g;
}

void analysis_step(std::span<const double> x, std::span<const double> h, std::span<const double> g,
                   std::vector<double>& approx, std::vector<double>& detail) {
  const std::size_t n = x.size();
  const std::size_t half = n / 2;
  approx.assign(half, 0.0);
  detail.assign(half, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    double a = 0.0, d = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      double v = x[(2 * i + k) % n];
      a += h[k] * v;
      d += g[k] * v;
    }
    approx[i] = a;
    detail[i] = d;
  }
}

std::vector<double> synthesis_step(std::span<const double> approx, std::span<const double> detail,
                                   std::span<const double> h, std::span<const double> g) {
  const std::size_t half = approx.size();
  const std::size_t n = 2 * half;
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    for (std::size_t k = 0; k < h.size(); ++k) {
      x[(2 * i + k) % n] += h[k] * approx[i] + g[k] * detail[i];
    }
  }
  return x;
}

double median_abs(std::vector<double> v) {
  for (auto& x : v) x = std::abs(x);
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

double soft(double v, double t) {
  double a = std::abs(v) - t;
  return a > 0.0 ? std::copysign(a, v) : 0.0;
}

// Interpolates missing detections on one axis of one keypoint.
std::vector<double> fill_gaps(const KeypointTrace& trace, std::size_t kp, Axis axis) {
  const auto frames = trace.frames();
  const auto times = trace.frame_times();
  const std::size_t n = frames.size();
  auto value = [&](std::size_t f) { return axis == Axis::x ? frames[f][kp].x : frames[f][kp].y; };

  std::vector<double> out(n);
  std::size_t prev = n;  // last detected frame, n = none yet
  for (std::size_t f = 0; f < n; ++f) {
    if (frames[f][kp].detected()) {
      out[f] = value(f);
      prev = f;
      continue;
    }
    std::size_t next = f + 1;
    while (next < n && !frames[next][kp].detected()) ++next;
    if (prev == n) {
      out[f] = value(next);
    } else if (next == n) {
      out[f] = value(prev);
    } else {
      double w = (times[f] - times[prev]) / (times[next] - times[prev]);
      out[f] = value(prev) + w * (value(next) - value(prev));
    }
  }
  return out;
}

}  // namespace

std::span<const double> scaling_filter(const std::string& wavelet) {
  if (wavelet == "haar" || wavelet == "db1") return kHaar;
  if (wavelet == "db2") return kDb2;
  if (wavelet == "db4") return kDb4;
  throw PreconditionError("unknown wavelet '" + wavelet + "' (expected haar, db2 or db4)");
}

WaveletCoefficients wavelet_decompose(std::span<const double> signal, const std::string& wavelet, int levels) {
  if (levels < 1) throw PreconditionError("wavelet levels must be >= 1");
  const std::size_t block = std::size_t{1} << levels;
  if (signal.empty() || signal.size() % block != 0) {
    throw PreconditionError("signal length must be a non-zero multiple of 2^levels");
  }
  auto h = scaling_filter(wavelet);
  auto g = wavelet_filter(h);
  WaveletCoefficients out;
  std::vector<double> current(signal.begin(), signal.end());
  std::vector<double> approx, detail;
  for (int level = 0; level < levels; ++level) {
    analysis_step(current, h, g, approx, detail);
    out.details.push_back(detail);
    current = approx;
  }
  out.approximation = std::move(current);
  return out;
}

std::vector<double> wavelet_reconstruct(const WaveletCoefficients& coeffs, const std::string& wavelet) {
  auto h = scaling_filter(wavelet);
  auto g = wavelet_filter(h);
  std::vector<double> current = coeffs.approximation;
  for (auto level = coeffs.details.size(); level-- > 0;) {
    if (coeffs.details[level].size() != current.size()) {
      throw PreconditionError("wavelet coefficient sizes are inconsistent");
    }
    current = synthesis_step(current, coeffs.details[level], h, g);
  }
  return current;
}

UniformSeries dwt_denoise(const UniformSeries& series, const DenoiseConfig& cfg) {
  if (cfg.levels < 1) throw PreconditionError("denoise levels must be >= 1");
  scaling_filter(cfg.wavelet);
  const std::size_t n = series.size();
  const std::size_t block = std::size_t{1} << cfg.levels;
  if (n < block) {
    throw PreconditionError("series of length " + std::to_string(n) + " is too short for " +
                            std::to_string(cfg.levels) + " wavelet levels");
  }
  // Half-sample symmetric extension up to a multiple of 2^levels.
  const std::size_t padded = (n + block - 1) / block * block;
  auto samples = series.samples();
  std::vector<double> x(samples.begin(), samples.end());
  for (std::size_t j = 0; x.size() < padded; ++j) x.push_back(samples[n - 1 - j]);

  auto coeffs = wavelet_decompose(x, cfg.wavelet, cfg.levels);
  const double sigma = median_abs(coeffs.details.front()) / 0.6745;
  const double lambda = sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));
  if (lambda > 0.0) {
    for (auto& level : coeffs.details) {
      for (auto& d : level) d = soft(d, lambda);
    }
  }
  auto y = wavelet_reconstruct(coeffs, cfg.wavelet);
  y.resize(n);
  return series.with_samples(std::move(y));
}

std::vector<UniformSeries> dwt_denoise_all(const std::vector<UniformSeries>& series, const DenoiseConfig& cfg,
                                           unsigned threads) {
  std::vector<std::optional<UniformSeries>> slots(series.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(series.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < series.size(); i = next++) {
      try {
        slots[i] = dwt_denoise(series[i], cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::min<unsigned>(std::max(threads, 1u), static_cast<unsigned>(std::max<std::size_t>(series.size(), 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<UniformSeries> out;
  out.reserve(series.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<UniformSeries> keypoint_series(const KeypointTrace& trace, const KeypointSeriesOptions& opts) {
  if (trace.size() < 2) throw PreconditionError("keypoint trace needs at least 2 frames");
  const double rate = opts.target_rate > 0.0 ? opts.target_rate : trace.frame_rate();
  const auto frames = trace.frames();
  std::vector<UniformSeries> out;
  for (std::size_t kp = 0; kp < kKeypointCount; ++kp) {
    auto detected = std::count_if(frames.begin(), frames.end(), [&](const KeypointFrame& f) { return f[kp].detected(); });
    double missing = 1.0 - static_cast<double>(detected) / static_cast<double>(frames.size());
    if (detected == 0 || missing > opts.max_missing_fraction) continue;
    for (Axis axis : {Axis::x, Axis::y}) {
      auto filled = fill_gaps(trace, kp, axis);
      auto uniform = resample_uniform(trace.frame_times(), filled, rate, SeriesOrigin::keypoint(static_cast<int>(kp), axis));
      std::vector<double> v(uniform.samples().begin(), uniform.samples().end());
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      for (auto& s : v) s -= mean;
      out.push_back(uniform.with_samples(std::move(v)));
    }
  }
  if (out.empty()) throw PreconditionError("no usable keypoint series: every keypoint is missing too often");
  return out;
}

SeriesSelection select_video_series(std::span<const UniformSeries> candidates) {
  if (candidates.empty()) throw PreconditionError("no candidate series to select from");
  SeriesSelection best;
  double best_score = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double peak = 0.0;
    if (candidates[i].size() >= 2) {
      auto mags = fft_half_magnitudes(candidates[i].samples());
      peak = mags.empty() ? 0.0 : *std::max_element(mags.begin(), mags.end());
    }
    if (peak > best_score) {
      best_score = peak;
      best.index = i;
    }
  }
  best.score = best_score;
  best.zero_energy = best_score <= 0.0;
  return best;
}

SeriesSelection select_csi_subcarrier(std::span<const UniformSeries> columns, FrequencyBand band) {
  if (columns.empty()) throw PreconditionError("CSI trace has no columns to select from");
  SeriesSelection best;
  double best_score = -1.0;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    double e = band_energy(columns[i].samples(), columns[i].rate(), band);
    if (e > best_score) {
      best_score = e;
      best.index = i;
    }
  }
  best.score = best_score;
  best.zero_energy = best_score <= 0.0;
  return best;
}

}  // namespace surfi
