#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace surfi::test {

// Direct O(n^2) DFT, unnormalized. Twiddles come from a table indexed by
// k*j mod n, which keeps the angle exact for large n.
inline std::vector<std::complex<double>> brute_dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> twiddle(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
    twiddle[m] = {std::cos(angle), std::sin(angle)};
  }
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    std::size_t m = 0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += x[j] * twiddle[m];
      m += k;
      if (m >= n) m -= n;
    }
    out[k] = acc;
  }
  return out;
}

inline std::vector<std::complex<double>> brute_dft(const std::vector<double>& x) {
  return brute_dft(std::vector<std::complex<double>>(x.begin(), x.end()));
}

inline std::vector<double> brute_half_magnitudes(const std::vector<double>& x) {
  auto X = brute_dft(x);
  std::vector<double> out;
  for (std::size_t k = 1; k <= x.size() / 2; ++k) out.push_back(std::abs(X[k]));
  return out;
}

// Energy over a mean-removed window, the way the pipeline defines it.
inline double brute_motion_energy(std::vector<double> x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (double& v : x) v -= mean;
  double e = 0.0;
  for (double m : brute_half_magnitudes(x)) e += m * m;
  return e;
}

inline std::vector<double> sine(std::size_t n, double rate, double freq, double amp = 1.0, double phase = 0.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate + phase);
  }
  return v;
}

inline std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, sigma);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline double rel_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("surfi_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace surfi::test
