#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace surfi {

inline constexpr std::size_t kKeypointCount = 25;

enum class Axis { x, y };

// Where a scalar series came from: a keypoint axis, a CSI subcarrier column,
// or something computed from other series.
struct SeriesOrigin {
  enum class Kind { keypoint, subcarrier, derived };

  Kind kind = Kind::derived;
  int index = -1;
  Axis axis = Axis::x;

  static SeriesOrigin keypoint(int id, Axis a) { return {Kind::keypoint, id, a}; }
  static SeriesOrigin subcarrier(int column) { return {Kind::subcarrier, column, Axis::x}; }

  // "kp7.y", "sc12" or "derived".
  std::string label() const;

  friend bool operator==(const SeriesOrigin&, const SeriesOrigin&) = default;
};

// A real-valued series sampled at a fixed rate. Immutable once built.
class UniformSeries {
 public:
  UniformSeries(double rate, std::vector<double> samples, SeriesOrigin origin = {}, double t0 = 0.0);

  double rate() const { return rate_; }
  double t0() const { return t0_; }
  const SeriesOrigin& origin() const { return origin_; }
  std::span<const double> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double duration() const { return static_cast<double>(samples_.size()) / rate_; }
  double time_at(std::size_t i) const { return t0_ + static_cast<double>(i) / rate_; }

  // Samples whose times fall in [start_s, end_s), clipped to the series.
  UniformSeries slice(double start_s, double end_s) const;

  UniformSeries with_samples(std::vector<double> samples) const {
    return UniformSeries(rate_, std::move(samples), origin_, t0_);
  }

 private:
  double rate_;
  std::vector<double> samples_;
  SeriesOrigin origin_;
  double t0_;
};

// Timestamped CSI amplitudes, one row per packet and one column per
// subcarrier stream. Row-major storage.
class CsiTrace {
 public:
  CsiTrace(std::vector<double> timestamps, std::vector<double> amplitudes, std::size_t columns);

  std::size_t rows() const { return timestamps_.size(); }
  std::size_t columns() const { return columns_; }
  std::span<const double> timestamps() const { return timestamps_; }
  std::span<const double> amplitudes() const { return amplitudes_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(amplitudes_).subspan(r * columns_, columns_);
  }
  double at(std::size_t r, std::size_t c) const { return amplitudes_[r * columns_ + c]; }
  std::vector<double> column(std::size_t c) const;

  // Median packet rate, in Hz.
  double nominal_rate() const { return nominal_rate_; }

  friend bool operator==(const CsiTrace&, const CsiTrace&) = default;

 private:
  std::vector<double> timestamps_;
  std::vector<double> amplitudes_;
  std::size_t columns_;
  double nominal_rate_;
};

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;

  bool detected() const { return confidence > 0.0; }
  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

using KeypointFrame = std::array<Keypoint, kKeypointCount>;

// Per-frame body keypoints (BODY_25 order). A missing detection has
// confidence 0.
class KeypointTrace {
 public:
  KeypointTrace(std::vector<double> frame_times, std::vector<KeypointFrame> frames);

  std::size_t size() const { return frames_.size(); }
  std::span<const double> frame_times() const { return frame_times_; }
  std::span<const KeypointFrame> frames() const { return frames_; }

  // Median frame rate, in Hz.
  double frame_rate() const { return frame_rate_; }

  friend bool operator==(const KeypointTrace&, const KeypointTrace&) = default;

 private:
  std::vector<double> frame_times_;
  std::vector<KeypointFrame> frames_;
  double frame_rate_;
};

enum class CsiFormat { jsonl, csv };

CsiFormat csi_format_from_path(const std::string& path);

CsiTrace parse_csi_trace(std::istream& in, CsiFormat format);
KeypointTrace parse_keypoint_trace(std::istream& in);

CsiTrace read_csi_trace(const std::string& path);
KeypointTrace read_keypoint_trace(const std::string& path);

// Writers emit the shortest representation that parses back to the same
// double, so a write/parse cycle is lossless.
void write_csi_trace(std::ostream& out, const CsiTrace& trace, CsiFormat format);
void write_keypoint_trace(std::ostream& out, const KeypointTrace& trace);

// Linear interpolation onto a uniform grid t0 + i/target_rate covering
// [timestamps.front(), timestamps.back()]. No extrapolation.
UniformSeries resample_uniform(std::span<const double> timestamps, std::span<const double> values,
                               double target_rate, SeriesOrigin origin = {});

}  // namespace surfi
