#include "surfi/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "surfi/error.hpp"

namespace surfi {

namespace {

std::size_t to_samples(double seconds, double rate) {
  return static_cast<std::size_t>(std::max(1L, std::lround(seconds * rate)));
}

// Mean of v[lo, hi) from a prefix-sum table.
double range_mean(const std::vector<double>& prefix, std::size_t lo, std::size_t hi) {
  return hi > lo ? (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo) : 0.0;
}

std::vector<double> prefix_sums(std::span<const double> v) {
  std::vector<double> p(v.size() + 1, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) p[i + 1] = p[i] + v[i];
  return p;
}

}  // namespace

std::vector<EventWindow> detect_events_csi(const MotionEnergySeries& energy, const CsiDetectorConfig& cfg) {
  if (!(cfg.k > 0.0) || !(energy.rate > 0.0)) throw PreconditionError("detector needs k > 0 and a valid energy rate");
  const auto& e = energy.values;
  const std::size_t n = e.size();
  const std::size_t vw = std::max<std::size_t>(2, to_samples(cfg.variance_window_s, energy.rate));
  const std::size_t bw = to_samples(cfg.baseline_window_s, energy.rate);
  const std::size_t hyst = to_samples(cfg.hysteresis_s, energy.rate);
  const std::size_t confirm = std::max<std::size_t>(1, to_samples(cfg.confirm_s, energy.rate));
  if (n < vw + bw) {
    throw PreconditionError("energy series too short for the detector baseline (" + std::to_string(n) +
                            " windows, need " + std::to_string(vw + bw) + ")");
  }

  // Population variance of e over the trailing vw windows, defined from vw-1.
  std::vector<double> rv(n, 0.0);
  for (std::size_t i = vw - 1; i < n; ++i) {
    double m = 0.0;
    for (std::size_t j = i + 1 - vw; j <= i; ++j) m += e[j];
    m /= static_cast<double>(vw);
    double s = 0.0;
    for (std::size_t j = i + 1 - vw; j <= i; ++j) s += (e[j] - m) * (e[j] - m);
    rv[i] = s / static_cast<double>(vw);
  }
  const auto rv_prefix = prefix_sums(rv);

  std::vector<EventWindow> events;
  auto close = [&](std::size_t start_idx, std::size_t end_idx) {
    if (end_idx <= start_idx) return;
    EventWindow w{energy.window_start(start_idx), energy.window_start(end_idx)};
    if (w.duration() >= cfg.min_event_s - 1e-9) events.push_back(w);
  };

  bool active = false;
  std::size_t start_idx = 0, first_below = 0, below_run = 0, excursion = 0;
  double held = 0.0;
  for (std::size_t i = vw - 1 + bw; i < n; ++i) {
    if (!active) {
      const double base = std::max(range_mean(rv_prefix, i - bw, i), cfg.variance_floor);
      if (rv[i] > cfg.k * base) {
        // One outlying E sample lifts exactly vw variance samples, so a real
        // onset has to stay above the trigger for longer than that.
        std::size_t run = 1;
        while (run < confirm && i + run < n && rv[i + run] > cfg.k * base) ++run;
        if (run < confirm && i + run < n) continue;
        active = true;
        start_idx = i;
        held = base;
        below_run = 0;
        excursion = 0;
      }
      continue;
    }
    if (rv[i] > cfg.k * held) {
      // A single outlying E sample lifts at most vw variance samples; such a
      // short excursion pauses the countdown instead of restarting it.
      if (below_run > 0 && excursion < vw) {
        ++excursion;
      } else {
        below_run = 0;
        excursion = 0;
      }
      continue;
    }
    excursion = 0;
    if (below_run++ == 0) first_below = i;
    if (below_run >= hyst) {
      // The variance window first held no active sample at first_below.
      close(start_idx, first_below + 1 - vw);
      active = false;
    }
  }
  if (active) close(start_idx, below_run > 0 ? first_below + 1 - vw : n);
  return events;
}

std::optional<TimeBounds> detect_bounds_video(const MotionEnergySeries& energy, const EventWindow& hint,
                                              const VideoDetectorConfig& cfg) {
  const auto& e = energy.values;
  const std::size_t n = e.size();
  if (n < 2 || !(energy.rate > 0.0)) throw PreconditionError("video energy series needs at least 2 windows");
  const double series_start = energy.window_start(0);
  const double series_end = energy.window_end(n - 1);
  const double lo_t = std::max(hint.start_s - cfg.search_pad_s, series_start);
  const double hi_t = std::min(hint.end_s + cfg.search_pad_s, series_end);
  if (!(hint.end_s > series_start && hint.start_s < series_end) || lo_t >= hi_t) {
    throw PreconditionError("video series does not cover the event window");
  }
  auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil((lo_t - energy.t0) * energy.rate - 1e-9)));
  auto hi_end = static_cast<std::size_t>(std::floor((hi_t - energy.t0) * energy.rate + 1e-9));
  hi_end = std::min(hi_end, n);
  if (hi_end <= lo) return std::nullopt;
  const std::size_t hi = hi_end - 1;

  const std::size_t bw = to_samples(cfg.baseline_window_s, energy.rate);
  const std::size_t min_bw = std::max<std::size_t>(1, to_samples(cfg.min_baseline_fraction * cfg.baseline_window_s, energy.rate));
  const std::size_t cw = std::max<std::size_t>(1, to_samples(cfg.confirm_window_s, energy.rate));
  const auto prefix = prefix_sums(e);
  // [b0, b1) is the baseline, [c0, c1) the confirmation span that includes i.
  auto crosses = [&](std::size_t i, std::size_t b0, std::size_t b1, std::size_t c0, std::size_t c1) {
    if (b1 - b0 < min_bw) return false;
    const double baseline = range_mean(prefix, b0, b1);
    return e[i] > cfg.energy_floor && e[i] >= cfg.ratio * baseline &&
           range_mean(prefix, c0, c1) >= cfg.ratio * baseline;
  };

  std::optional<std::size_t> onset;
  for (std::size_t i = std::max<std::size_t>(lo, 1); i <= hi; ++i) {
    if (crosses(i, i >= bw ? i - bw : 0, i, i, std::min(n, i + cw))) {
      onset = i;
      break;
    }
  }
  std::optional<std::size_t> offset;
  for (std::size_t i = std::min(hi, n - 2) + 1; i-- > lo;) {
    if (crosses(i, i + 1, std::min(n, i + 1 + bw), i + 1 >= cw ? i + 1 - cw : 0, i + 1)) {
      offset = i;
      break;
    }
  }
  if (!onset || !offset || *offset < *onset) return std::nullopt;
  return TimeBounds{energy.window_start(*onset), energy.window_end(*offset)};
}

std::optional<TimeBounds> detect_bounds_video(const UniformSeries& series, const EventWindow& hint,
                                              const VideoDetectorConfig& cfg, double energy_window_s) {
  return detect_bounds_video(motion_energy_series(series, energy_window_s), hint, cfg);
}

EventVerdict compare(const AttributePair& pair, const Thresholds& th) {
  auto within = [](const std::optional<double>& a, const std::optional<double>& b, double t) {
    return a && b && std::abs(*a - *b) <= t ? 1 : 0;
  };
  EventVerdict v;
  v.per_attribute = {within(pair.video.tau_start, pair.csi.tau_start, th.t_start),
                     within(pair.video.tau_end, pair.csi.tau_end, th.t_end),
                     within(pair.video.freq, pair.csi.freq, th.t_freq)};
  v.score = v.per_attribute[0] + v.per_attribute[1] + v.per_attribute[2];
  return v;
}

std::string to_string(Verdict v) { return v == Verdict::legitimate ? "legitimate" : "looped"; }

Decision decide(std::span<const int> scores, double threshold) {
  if (scores.empty()) throw PreconditionError("decision needs at least one event score");
  for (int s : scores) {
    if (s < 0 || s > 3) throw PreconditionError("event scores must lie in 0..3");
  }
  Decision d;
  d.n_events = scores.size();
  d.mean_score = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
  d.threshold = threshold;
  d.verdict = d.mean_score >= threshold ? Verdict::legitimate : Verdict::looped;
  return d;
}

CalibrationResult calibrate_decision_threshold(std::span<const double> legit_means, double target_fpr) {
  if (legit_means.empty()) throw PreconditionError("calibration needs at least one legitimate sequence");
  if (!(target_fpr > 0.0 && target_fpr < 1.0)) throw PreconditionError("target FPR must lie in (0, 1)");
  std::vector<double> sorted(legit_means.begin(), legit_means.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  // At most k = floor(target * n) sequences may fall strictly below.
  const auto k = static_cast<std::size_t>(std::floor(target_fpr * static_cast<double>(n) + 1e-9));
  CalibrationResult r;
  r.threshold = sorted[std::min(k, n - 1)];
  r.samples = n;
  const auto below = std::lower_bound(sorted.begin(), sorted.end(), r.threshold) - sorted.begin();
  r.empirical_fpr = static_cast<double>(below) / static_cast<double>(n);
  r.undersampled = static_cast<double>(n) * target_fpr < 1.0 - 1e-12;
  return r;
}

CsiAnalysis analyze_csi(const CsiTrace& trace, const PipelineConfig& cfg) {
  if (trace.rows() < 2) throw PreconditionError("CSI trace needs at least 2 packets");
  std::vector<UniformSeries> columns;
  columns.reserve(trace.columns());
  for (std::size_t c = 0; c < trace.columns(); ++c) {
    auto values = trace.column(c);
    columns.push_back(
        resample_uniform(trace.timestamps(), values, cfg.csi_rate, SeriesOrigin::subcarrier(static_cast<int>(c))));
  }
  auto denoised = dwt_denoise_all(columns, cfg.denoise, cfg.threads);
  auto sel = select_csi_subcarrier(denoised, cfg.selection_band);
  auto energy = motion_energy_series(denoised[sel.index], cfg.energy_window_s);
  auto events = detect_events_csi(energy, cfg.csi_detector);
  return CsiAnalysis{sel.index, sel.score, std::move(denoised[sel.index]), std::move(energy), std::move(events)};
}

VideoAnalysis analyze_video(const KeypointTrace& trace, const PipelineConfig& cfg) {
  auto candidates = keypoint_series(trace, {0.5, cfg.video_rate});
  auto sel = select_video_series(candidates);
  auto energy = motion_energy_series(candidates[sel.index], cfg.energy_window_s);
  return VideoAnalysis{sel, candidates.size(), std::move(candidates[sel.index]), std::move(energy)};
}

std::optional<SpectralPeak> video_frequency(const UniformSeries& video, double start_s, double end_s,
                                            const PipelineConfig& cfg) {
  try {
    return prominent_frequency(video.slice(start_s, end_s), cfg.video_band);
  } catch (const PreconditionError&) {
    return std::nullopt;
  } catch (const NoPeakError&) {
    return std::nullopt;
  }
}

std::optional<SpectralPeak> csi_frequency(const UniformSeries& csi, const EventWindow& window,
                                          std::optional<double> f_video, const PipelineConfig& cfg) {
  const double low = cfg.csi_band_low_hz;
  const double high = f_video ? *f_video + cfg.csi_band_margin_hz : cfg.selection_band.high_hz;
  try {
    auto filtered = bandpass(csi.slice(window.start_s, window.end_s), low, high);
    return prominent_frequency(filtered, {low, high});
  } catch (const PreconditionError&) {
    return std::nullopt;
  } catch (const NoPeakError&) {
    return std::nullopt;
  }
}

std::optional<SpectralPeak> CsiFrequencyCache::get(const UniformSeries& csi, const EventWindow& window,
                                                   std::optional<double> f_video, const PipelineConfig& cfg) {
  auto key = std::make_tuple(window.start_s, window.end_s, f_video.value_or(-1.0));
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  auto peak = csi_frequency(csi, window, f_video, cfg);
  memo_.emplace(key, peak);
  return peak;
}

namespace {

AttributePair build_attributes(const UniformSeries& video, const MotionEnergySeries& video_energy,
                               const UniformSeries& csi, const EventWindow& window, const PipelineConfig& cfg,
                               CsiFrequencyCache* cache, std::vector<std::string>* notes) {
  AttributePair pair;
  pair.csi.tau_start = window.start_s;
  pair.csi.tau_end = window.end_s;

  auto bounds = detect_bounds_video(video_energy, window, cfg.video_detector);
  std::optional<SpectralPeak> fv;
  if (bounds) {
    pair.video.tau_start = bounds->start_s;
    pair.video.tau_end = bounds->end_s;
    fv = video_frequency(video, bounds->start_s, bounds->end_s, cfg);
  } else {
    if (notes) notes->push_back("video: no onset/offset near the CSI event (no-event marker)");
    fv = video_frequency(video, window.start_s, window.end_s, cfg);
  }
  if (fv) {
    pair.video.freq = fv->frequency;
  } else if (notes) {
    notes->push_back("video: no prominent frequency");
  }

  std::optional<double> fv_hz = fv ? std::optional<double>(fv->frequency) : std::nullopt;
  auto fc = cache ? cache->get(csi, window, fv_hz, cfg) : csi_frequency(csi, window, fv_hz, cfg);
  if (fc) {
    pair.csi.freq = fc->frequency;
  } else if (notes) {
    notes->push_back("csi: no prominent frequency");
  }
  return pair;
}

}  // namespace

AttributePair extract_attributes(const UniformSeries& video, const UniformSeries& csi, const EventWindow& window,
                                 const PipelineConfig& cfg) {
  auto energy = motion_energy_series(video, cfg.energy_window_s);
  return build_attributes(video, energy, csi, window, cfg, nullptr, nullptr);
}

EventResult score_event(const VideoAnalysis& video, const CsiAnalysis& csi, const EventWindow& window,
                        const PipelineConfig& cfg, CsiFrequencyCache* cache) {
  EventResult r;
  r.window = window;
  r.attributes = build_attributes(video.series, video.energy, csi.series, window, cfg, cache, &r.notes);
  r.verdict = compare(r.attributes, cfg.thresholds);
  return r;
}

DetectionReport run_detection(const KeypointTrace& video, const CsiTrace& csi, const PipelineConfig& cfg) {
  DetectionReport report{analyze_csi(csi, cfg), analyze_video(video, cfg), {}, std::nullopt, {}};
  if (report.video.selection.zero_energy) {
    report.warnings.push_back("every keypoint series has zero spectral energy; selected the first candidate");
  }
  std::vector<int> scores;
  for (const auto& w : report.csi.events) {
    report.events.push_back(score_event(report.video, report.csi, w, cfg));
    scores.push_back(report.events.back().verdict.score);
  }
  if (scores.empty()) {
    report.warnings.push_back("no events detected in the CSI trace");
  } else {
    report.decision = decide(scores, cfg.decision_threshold);
  }
  return report;
}

}  // namespace surfi
