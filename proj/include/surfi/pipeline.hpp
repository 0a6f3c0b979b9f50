#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "surfi/preprocess.hpp"
#include "surfi/spectral.hpp"
#include "surfi/trace_model.hpp"

namespace surfi {

// An activity interval found in the CSI energy stream.
struct EventWindow {
  double start_s = 0.0;
  double end_s = 0.0;

  double duration() const { return end_s - start_s; }
  friend bool operator==(const EventWindow&, const EventWindow&) = default;
};

// Variance trigger over the CSI motion-energy stream.
//
// The rolling variance of E over `variance_window_s` is compared against the
// mean of that variance over the preceding `baseline_window_s`. An event
// starts when the variance exceeds `k` times that mean and stays above it for
// `confirm_s` (longer than the variance window, so one outlying E sample
// cannot start an event); the mean is then held
// fixed for the rest of the event, and the event ends once the variance stays
// at or below `k` times the held mean for `hysteresis_s`. Excursions above it
// no longer than the variance window pause that countdown rather than
// restarting it. Events shorter than `min_event_s` are dropped.
// `variance_floor` bounds the held mean from below so a noise-free baseline
// cannot trigger on rounding residue.
struct CsiDetectorConfig {
  double variance_window_s = 0.5;
  double baseline_window_s = 3.0;
  double k = 3.0;
  double hysteresis_s = 1.0;
  double min_event_s = 2.0;
  double confirm_s = 0.8;
  double variance_floor = 1e-18;
};

// Instantaneous-energy trigger over the selected video series: onset is the
// first window whose E reaches `ratio` times the mean E of the preceding
// `baseline_window_s`; the end is the same rule run backwards in time.
// A crossing only counts when the mean E over `confirm_window_s` starting at
// it also reaches that level (an isolated jitter spike does not) and at least
// `min_baseline_fraction` of the baseline window lies inside the series.
struct VideoDetectorConfig {
  double ratio = 10.0;
  double baseline_window_s = 3.0;
  double confirm_window_s = 1.0;
  double min_baseline_fraction = 0.5;
  double search_pad_s = 5.0;
  double energy_floor = 1e-18;
};

struct Thresholds {
  double t_start = 2.5;  // s
  double t_end = 2.0;    // s
  double t_freq = 0.25;  // Hz
};

struct PipelineConfig {
  double csi_rate = 1000.0;
  double video_rate = 30.0;
  DenoiseConfig denoise;
  double energy_window_s = 0.1;
  FrequencyBand selection_band = kSelectionBand;
  FrequencyBand video_band{0.3, 10.0};
  double csi_band_low_hz = 0.3;
  double csi_band_margin_hz = 1.0;  // CSI search band is [low, f_video + margin]
  CsiDetectorConfig csi_detector;
  VideoDetectorConfig video_detector;
  Thresholds thresholds;
  double decision_threshold = 2.0;
  std::optional<double> target_fpr;
  unsigned threads = 1;
};

std::vector<EventWindow> detect_events_csi(const MotionEnergySeries& energy, const CsiDetectorConfig& cfg = {});

struct TimeBounds {
  double start_s = 0.0;
  double end_s = 0.0;
};

// std::nullopt is the no-event marker: no onset or no offset inside the
// padded hint.
std::optional<TimeBounds> detect_bounds_video(const MotionEnergySeries& energy, const EventWindow& hint,
                                              const VideoDetectorConfig& cfg = {});
std::optional<TimeBounds> detect_bounds_video(const UniformSeries& series, const EventWindow& hint,
                                              const VideoDetectorConfig& cfg = {}, double energy_window_s = 0.1);

// One side of an event's attributes. Empty bounds or frequency mark an
// attribute that could not be extracted.
struct AttributeTriple {
  std::optional<double> tau_start;
  std::optional<double> tau_end;
  std::optional<double> freq;
};

struct AttributePair {
  AttributeTriple video;
  AttributeTriple csi;
};

struct EventVerdict {
  std::array<int, 3> per_attribute{0, 0, 0};
  int score = 0;
};

EventVerdict compare(const AttributePair& pair, const Thresholds& th = {});

enum class Verdict { legitimate, looped };

std::string to_string(Verdict v);

struct Decision {
  double mean_score = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::legitimate;
  std::size_t n_events = 0;
};

Decision decide(std::span<const int> scores, double threshold);

struct CalibrationResult {
  double threshold = 0.0;
  double empirical_fpr = 0.0;  // fraction of inputs strictly below threshold
  std::size_t samples = 0;
  bool undersampled = false;  // fewer than 1/target_fpr inputs
};

// Largest t with #{mean < t} / N <= target_fpr (lower empirical quantile).
CalibrationResult calibrate_decision_threshold(std::span<const double> legit_means, double target_fpr);

// Per-trace stages.

struct CsiAnalysis {
  std::size_t selected_column = 0;
  double selection_energy = 0.0;
  UniformSeries series;  // denoised, resampled, selected column
  MotionEnergySeries energy;
  std::vector<EventWindow> events;
};

struct VideoAnalysis {
  SeriesSelection selection;
  std::size_t candidates = 0;
  UniformSeries series;
  MotionEnergySeries energy;
};

CsiAnalysis analyze_csi(const CsiTrace& trace, const PipelineConfig& cfg = {});
VideoAnalysis analyze_video(const KeypointTrace& trace, const PipelineConfig& cfg = {});

std::optional<SpectralPeak> video_frequency(const UniformSeries& video, double start_s, double end_s,
                                            const PipelineConfig& cfg);
std::optional<SpectralPeak> csi_frequency(const UniformSeries& csi, const EventWindow& window,
                                          std::optional<double> f_video, const PipelineConfig& cfg);

// Memo for csi_frequency keyed by (window, f_video). Only valid for one CSI
// series; not thread-safe.
class CsiFrequencyCache {
 public:
  std::optional<SpectralPeak> get(const UniformSeries& csi, const EventWindow& window,
                                  std::optional<double> f_video, const PipelineConfig& cfg);

 private:
  std::map<std::tuple<double, double, double>, std::optional<SpectralPeak>> memo_;
};

struct EventResult {
  EventWindow window;
  AttributePair attributes;
  EventVerdict verdict;
  std::vector<std::string> notes;
};

AttributePair extract_attributes(const UniformSeries& video, const UniformSeries& csi, const EventWindow& window,
                                 const PipelineConfig& cfg = {});

EventResult score_event(const VideoAnalysis& video, const CsiAnalysis& csi, const EventWindow& window,
                        const PipelineConfig& cfg, CsiFrequencyCache* cache = nullptr);

struct DetectionReport {
  CsiAnalysis csi;
  VideoAnalysis video;
  std::vector<EventResult> events;
  std::optional<Decision> decision;  // empty when no event was detected
  std::vector<std::string> warnings;
};

DetectionReport run_detection(const KeypointTrace& video, const CsiTrace& csi, const PipelineConfig& cfg = {});

}  // namespace surfi
