#include "surfi/config.hpp"

#include <array>
#include <cmath>
#include <fstream>

#include "json_reader.hpp"
#include "surfi/error.hpp"

namespace surfi {

namespace {

void read_band(detail::JsonReader& r, const char* key, FrequencyBand& band) {
  std::array<double, 2> edges{band.low_hz, band.high_hz};
  r.read(key, edges);
  band = {edges[0], edges[1]};
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw PreconditionError(msg);
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

void validate(const PipelineConfig& c) {
  require(positive(c.csi_rate) && positive(c.video_rate), "rates must be positive");
  require(c.denoise.levels >= 1, "denoise.levels must be >= 1");
  scaling_filter(c.denoise.wavelet);
  require(positive(c.energy_window_s), "energy_window_s must be positive");
  for (auto [name, b] : {std::pair{"selection_band", c.selection_band}, std::pair{"video_band", c.video_band}}) {
    require(positive(b.low_hz) && b.low_hz < b.high_hz, std::string(name) + " must satisfy 0 < low < high");
  }
  require(positive(c.csi_band_low_hz) && positive(c.csi_band_margin_hz), "CSI band edges must be positive");
  const auto& d = c.csi_detector;
  require(positive(d.variance_window_s) && positive(d.baseline_window_s) && positive(d.k) &&
              positive(d.hysteresis_s) && positive(d.confirm_s) && d.min_event_s >= 0.0 && d.variance_floor >= 0.0,
          "csi_detector constants must be positive");
  const auto& v = c.video_detector;
  require(positive(v.ratio) && positive(v.baseline_window_s) && positive(v.confirm_window_s) &&
              v.min_baseline_fraction >= 0.0 && v.min_baseline_fraction <= 1.0 && v.search_pad_s >= 0.0 &&
              v.energy_floor >= 0.0,
          "video_detector constants must be positive");
  require(positive(c.thresholds.t_start) && positive(c.thresholds.t_end) && positive(c.thresholds.t_freq),
          "thresholds must be positive");
  require(std::isfinite(c.decision_threshold), "decision_threshold must be finite");
  if (c.target_fpr) require(*c.target_fpr > 0.0 && *c.target_fpr < 1.0, "target_fpr must lie in (0, 1)");
}

void validate(const EvalOptions& o) {
  require(o.max_events >= 1, "eval.max_events must be >= 1");
  require(o.sequences >= 1, "eval.sequences must be >= 1");
  require(!o.target_fprs.empty(), "eval.target_fprs must not be empty");
  for (double t : o.target_fprs) require(t > 0.0 && t < 1.0, "eval.target_fprs entries must lie in (0, 1)");
}

Settings settings_from_json(const nlohmann::json& j) {
  Settings s;
  auto& c = s.pipeline;
  std::vector<std::string> errors;
  detail::JsonReader r(j, "config", errors);
  r.read_number("csi_rate", c.csi_rate);
  r.read_number("video_rate", c.video_rate);
  if (const auto* d = r.child("denoise")) {
    detail::JsonReader dr(*d, "config.denoise", errors);
    dr.read("wavelet", c.denoise.wavelet);
    dr.read("levels", c.denoise.levels);
    dr.reject_unknown();
  }
  r.read_number("energy_window_s", c.energy_window_s);
  read_band(r, "selection_band", c.selection_band);
  read_band(r, "video_band", c.video_band);
  r.read_number("csi_band_low_hz", c.csi_band_low_hz);
  r.read_number("csi_band_margin_hz", c.csi_band_margin_hz);
  if (const auto* d = r.child("csi_detector")) {
    detail::JsonReader dr(*d, "config.csi_detector", errors);
    auto& x = c.csi_detector;
    dr.read_number("variance_window_s", x.variance_window_s);
    dr.read_number("baseline_window_s", x.baseline_window_s);
    dr.read_number("k", x.k);
    dr.read_number("hysteresis_s", x.hysteresis_s);
    dr.read_number("min_event_s", x.min_event_s);
    dr.read_number("confirm_s", x.confirm_s);
    dr.read_number("variance_floor", x.variance_floor);
    dr.reject_unknown();
  }
  if (const auto* d = r.child("video_detector")) {
    detail::JsonReader dr(*d, "config.video_detector", errors);
    auto& x = c.video_detector;
    dr.read_number("ratio", x.ratio);
    dr.read_number("baseline_window_s", x.baseline_window_s);
    dr.read_number("confirm_window_s", x.confirm_window_s);
    dr.read_number("min_baseline_fraction", x.min_baseline_fraction);
    dr.read_number("search_pad_s", x.search_pad_s);
    dr.read_number("energy_floor", x.energy_floor);
    dr.reject_unknown();
  }
  if (const auto* d = r.child("thresholds")) {
    detail::JsonReader dr(*d, "config.thresholds", errors);
    dr.read_number("t_start", c.thresholds.t_start);
    dr.read_number("t_end", c.thresholds.t_end);
    dr.read_number("t_freq", c.thresholds.t_freq);
    dr.reject_unknown();
  }
  r.read_number("decision_threshold", c.decision_threshold);
  if (const auto* t = r.child("target_fpr"); t && !t->is_null()) {
    if (t->is_number()) {
      c.target_fpr = t->get<double>();
    } else {
      r.fail("target_fpr", "expected a number or null");
    }
  }
  r.read("threads", c.threads);
  if (const auto* e = r.child("eval")) {
    detail::JsonReader er(*e, "config.eval", errors);
    er.read("max_events", s.eval.max_events);
    er.read("sequences", s.eval.sequences);
    er.read("target_fprs", s.eval.target_fprs);
    er.reject_unknown();
  }
  r.reject_unknown();

  if (errors.empty()) {
    try {
      validate(s.pipeline);
      validate(s.eval);
    } catch (const PreconditionError& e) {
      errors.push_back(e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ParseError(msg);
  }
  return s;
}

nlohmann::json settings_to_json(const Settings& s) {
  const auto& c = s.pipeline;
  const auto& cd = c.csi_detector;
  const auto& vd = c.video_detector;
  return {
      {"csi_rate", c.csi_rate},
      {"video_rate", c.video_rate},
      {"denoise", {{"wavelet", c.denoise.wavelet}, {"levels", c.denoise.levels}}},
      {"energy_window_s", c.energy_window_s},
      {"selection_band", {c.selection_band.low_hz, c.selection_band.high_hz}},
      {"video_band", {c.video_band.low_hz, c.video_band.high_hz}},
      {"csi_band_low_hz", c.csi_band_low_hz},
      {"csi_band_margin_hz", c.csi_band_margin_hz},
      {"csi_detector",
       {{"variance_window_s", cd.variance_window_s},
        {"baseline_window_s", cd.baseline_window_s},
        {"k", cd.k},
        {"hysteresis_s", cd.hysteresis_s},
        {"min_event_s", cd.min_event_s},
        {"confirm_s", cd.confirm_s},
        {"variance_floor", cd.variance_floor}}},
      {"video_detector",
       {{"ratio", vd.ratio},
        {"baseline_window_s", vd.baseline_window_s},
        {"confirm_window_s", vd.confirm_window_s},
        {"min_baseline_fraction", vd.min_baseline_fraction},
        {"search_pad_s", vd.search_pad_s},
        {"energy_floor", vd.energy_floor}}},
      {"thresholds", {{"t_start", c.thresholds.t_start}, {"t_end", c.thresholds.t_end}, {"t_freq", c.thresholds.t_freq}}},
      {"decision_threshold", c.decision_threshold},
      {"target_fpr", c.target_fpr ? nlohmann::json(*c.target_fpr) : nlohmann::json(nullptr)},
      {"threads", c.threads},
      {"eval",
       {{"max_events", s.eval.max_events}, {"sequences", s.eval.sequences}, {"target_fprs", s.eval.target_fprs}}},
  };
}

Settings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return settings_from_json(j);
}

}  // namespace surfi
