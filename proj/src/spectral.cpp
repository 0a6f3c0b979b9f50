#include "surfi/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "surfi/error.hpp"

namespace surfi {

namespace {

using cplx = std::complex<double>;

// Twiddles e^{-2πik/n} for k < n/2, cached per size and thread.
const std::vector<cplx>& twiddles(std::size_t n) {
  thread_local std::map<std::size_t, std::vector<cplx>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> w(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    w[k] = {std::cos(angle), std::sin(angle)};
  }
  if (cache.size() > 32) cache.clear();
  return cache.emplace(n, std::move(w)).first->second;
}

// Plain product; std::complex's operator* adds inf/nan recovery we do not need.
inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

void radix2(std::vector<cplx>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto& w = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cplx u = a[i + k];
        cplx v = mul(a[i + k + half], w[k * stride]);
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

struct BluesteinPlan {
  std::size_t m = 0;
  std::vector<cplx> chirp;      // e^{-iπk²/n}
  std::vector<cplx> kernel_ft;  // FFT of the conjugate chirp, wrapped to length m
};

const BluesteinPlan& bluestein_plan(std::size_t n) {
  thread_local std::map<std::size_t, BluesteinPlan> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  BluesteinPlan p;
  p.m = next_pow2(2 * n - 1);
  p.chirp.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small and exact.
    auto k2 = static_cast<unsigned long long>(k) * k % (2ull * n);
    double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    p.chirp[k] = {std::cos(angle), std::sin(angle)};
  }
  p.kernel_ft.assign(p.m, cplx{});
  p.kernel_ft[0] = std::conj(p.chirp[0]);
  for (std::size_t k = 1; k < n; ++k) p.kernel_ft[k] = p.kernel_ft[p.m - k] = std::conj(p.chirp[k]);
  radix2(p.kernel_ft);
  if (cache.size() > 32) cache.clear();
  return cache.emplace(n, std::move(p)).first->second;
}

void bluestein(std::vector<cplx>& a) {
  const std::size_t n = a.size();
  const auto& p = bluestein_plan(n);
  std::vector<cplx> x(p.m);
  for (std::size_t k = 0; k < n; ++k) x[k] = mul(a[k], p.chirp[k]);
  radix2(x);
  // Inverse via conjugation.
  for (std::size_t i = 0; i < p.m; ++i) x[i] = std::conj(mul(x[i], p.kernel_ft[i]));
  radix2(x);
  const double scale = 1.0 / static_cast<double>(p.m);
  for (std::size_t k = 0; k < n; ++k) a[k] = mul(std::conj(x[k]) * scale, p.chirp[k]);
}

// A constant window has no energy outside DC; return that exactly instead of
// the transform's rounding residue.
bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

double mean_of(std::span<const double> x) {
  return x.empty() ? 0.0 : std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<cplx>& data) {
  const std::size_t n = data.size();
  if (n <= 1) return;
  if ((n & (n - 1)) == 0) {
    radix2(data);
  } else {
    bluestein(data);
  }
}

void ifft_inplace(std::vector<cplx>& data) {
  for (auto& v : data) v = std::conj(v);
  fft_inplace(data);
  const double scale = data.empty() ? 1.0 : 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v = std::conj(v) * scale;
}

std::vector<cplx> real_dft(std::span<const double> samples) {
  std::vector<cplx> data(samples.begin(), samples.end());
  fft_inplace(data);
  return data;
}

std::vector<double> fft_half_magnitudes(std::span<const double> window) {
  if (window.size() < 2) throw PreconditionError("FFT window needs at least 2 samples");
  if (is_constant(window)) return std::vector<double>(window.size() / 2, 0.0);
  auto spectrum = real_dft(window);
  std::vector<double> mags(window.size() / 2);
  for (std::size_t k = 1; k <= mags.size(); ++k) mags[k - 1] = std::abs(spectrum[k]);
  return mags;
}

double motion_energy(std::span<const double> window) {
  if (window.size() < 2) throw PreconditionError("motion energy needs at least 2 samples");
  if (is_constant(window)) return 0.0;
  auto spectrum = real_dft(window);
  double e = 0.0;
  for (std::size_t k = 1; k <= window.size() / 2; ++k) e += std::norm(spectrum[k]);
  return e;
}

MotionEnergySeries motion_energy_series(const UniformSeries& series, double window_s) {
  if (!(window_s > 0.0)) throw PreconditionError("energy window must be > 0");
  const auto per_window = static_cast<std::size_t>(std::lround(window_s * series.rate()));
  if (per_window < 2) throw PreconditionError("energy window holds fewer than 2 samples at this rate");
  const std::size_t count = series.size() / per_window;
  if (count == 0) throw PreconditionError("series is shorter than one energy window");

  MotionEnergySeries out;
  out.samples_per_window = per_window;
  out.rate = series.rate() / static_cast<double>(per_window);
  out.window_s = 1.0 / out.rate;
  out.t0 = series.t0();
  out.source = series.origin();
  out.values.resize(count);
  auto samples = series.samples();
  std::vector<double> window(per_window);
  for (std::size_t w = 0; w < count; ++w) {
    auto chunk = samples.subspan(w * per_window, per_window);
    const double m = mean_of(chunk);
    for (std::size_t i = 0; i < per_window; ++i) window[i] = chunk[i] - m;
    out.values[w] = motion_energy(window);
  }
  return out;
}

SpectralPeak prominent_frequency(const UniformSeries& segment, FrequencyBand band) {
  const double rate = segment.rate();
  if (segment.duration() < kMinPeakSegmentS - 1e-9) {
    throw PreconditionError("segment shorter than 4 s; frequency resolution too coarse");
  }
  if (!(band.low_hz > 0.0 && band.high_hz > band.low_hz && band.high_hz <= rate / 2.0)) {
    throw PreconditionError("frequency band must satisfy 0 < low < high <= rate/2");
  }
  const std::size_t n = segment.size();
  const auto min_bins = static_cast<std::size_t>(std::ceil(rate / kMaxPeakBinWidthHz));
  const std::size_t padded = next_pow2(std::max(n, min_bins));

  auto samples = segment.samples();
  const double m = mean_of(samples);
  double abs_sum = 0.0;
  std::vector<cplx> data(padded);
  for (std::size_t i = 0; i < n; ++i) {
    data[i] = samples[i] - m;
    abs_sum += std::abs(samples[i]);
  }
  fft_inplace(data);

  const double bin_width = rate / static_cast<double>(padded);
  auto lo = static_cast<std::size_t>(std::max(1.0, std::ceil(band.low_hz / bin_width - 1e-9)));
  auto hi = static_cast<std::size_t>(std::floor(band.high_hz / bin_width + 1e-9));
  hi = std::min(hi, padded / 2);
  if (lo > hi) throw PreconditionError("frequency band contains no DFT bins");

  std::size_t best = lo;
  double best_mag = -1.0;
  for (std::size_t k = lo; k <= hi; ++k) {
    double mag = std::abs(data[k]);
    if (mag > best_mag) {
      best_mag = mag;
      best = k;
    }
  }
  if (best_mag <= 1e-12 * abs_sum) throw NoPeakError("segment has no spectral peak in band");
  return {static_cast<double>(best) * bin_width, best_mag, bin_width};
}

UniformSeries bandpass(const UniformSeries& series, double low_hz, double high_hz) {
  const double rate = series.rate();
  if (!(low_hz > 0.0 && high_hz > low_hz && high_hz < rate / 2.0)) {
    throw PreconditionError("bandpass requires 0 < low < high < rate/2");
  }
  const std::size_t n = series.size();
  if (n < 2) throw PreconditionError("bandpass needs at least 2 samples");
  auto spectrum = real_dft(series.samples());
  for (std::size_t k = 0; k < n; ++k) {
    double f = static_cast<double>(std::min(k, n - k)) * rate / static_cast<double>(n);
    if (f < low_hz || f > high_hz) spectrum[k] = 0.0;
  }
  ifft_inplace(spectrum);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = spectrum[i].real();
  return series.with_samples(std::move(out));
}

double band_energy(std::span<const double> samples, double rate, FrequencyBand band) {
  const std::size_t n = samples.size();
  if (n < 2) throw PreconditionError("band energy needs at least 2 samples");
  const double m = mean_of(samples);
  std::vector<cplx> data(n);
  for (std::size_t i = 0; i < n; ++i) data[i] = samples[i] - m;
  fft_inplace(data);
  double e = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    double f = static_cast<double>(k) * rate / static_cast<double>(n);
    if (f >= band.low_hz && f <= band.high_hz) e += std::norm(data[k]);
  }
  return e;
}

}  // namespace surfi
