#include "surfi/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "json_reader.hpp"
#include "surfi/error.hpp"

namespace surfi::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Standing-pose BODY_25 template, pixels on a 1280x720 frame.
constexpr std::array<std::array<double, 2>, kKeypointCount> kSkeleton{{
    {640, 200}, {640, 260}, {590, 260}, {570, 340}, {560, 410}, {690, 260}, {710, 340},
    {720, 410}, {640, 420}, {610, 420}, {605, 530}, {600, 640}, {670, 420}, {675, 530},
    {680, 640}, {625, 190}, {655, 190}, {610, 195}, {670, 195}, {690, 670}, {700, 665},
    {675, 650}, {590, 670}, {580, 665}, {605, 650},
}};

enum StreamTag : std::uint64_t { kVideoStream = 1, kCsiStream = 2, kTrialStream = 3 };

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// CSI-only motion before the activity: a half-sine envelope keeps it
// continuous at both ends.
double prelude_waveform(double t, const EventSpec& spec) {
  const double d = spec.csi_prelude_s;
  if (d <= 0.0) return 0.0;
  const double begin = spec.t_start - d;
  if (t < begin || t >= spec.t_start) return 0.0;
  const double u = (t - begin) / d;
  return std::sin(std::numbers::pi * u) * std::sin(kTwoPi * spec.csi_prelude_freq * (t - begin));
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

Axis axis_from_string(const std::string& s, std::vector<std::string>& errors, const std::string& where) {
  if (s == "x") return Axis::x;
  if (s != "y") errors.push_back(where + ": axis must be 'x' or 'y'");
  return Axis::y;
}

nlohmann::json number_or_inf(double v) {
  return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

void EventSpec::validate() const {
  if (!(freq > 0.0) || !std::isfinite(freq)) throw PreconditionError("event frequency must be > 0");
  if (!(t_start < t_end) || !std::isfinite(t_start) || !std::isfinite(t_end)) {
    throw PreconditionError("event needs t_start < t_end");
  }
  if (keypoint_id < 0 || keypoint_id >= static_cast<int>(kKeypointCount)) {
    throw PreconditionError("keypoint_id must be in 0..24");
  }
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw PreconditionError("snr_db must be a number or +inf");
  }
  if (!std::isfinite(clock_offset_s) || !std::isfinite(amplitude_px)) {
    throw PreconditionError("clock offset and amplitude must be finite");
  }
  if (!(csi_prelude_s >= 0.0) || (csi_prelude_s > 0.0 && !(csi_prelude_freq > 0.0))) {
    throw PreconditionError("prelude needs a non-negative duration and a positive frequency");
  }
  for (double g : csi_gain) {
    if (!std::isfinite(g) || g < 0.0) throw PreconditionError("csi_gain entries must be finite and >= 0");
  }
}

std::string to_string(TrialLabel label) { return label == TrialLabel::matched ? "matched" : "attack"; }

TrialLabel trial_label_from_string(const std::string& s) {
  if (s == "matched") return TrialLabel::matched;
  if (s == "attack") return TrialLabel::attack;
  throw ParseError("unknown trial label '" + s + "'");
}

double activity_waveform(double t, double freq, double t_start, double t_end) {
  if (t < t_start) return 0.0;
  return std::sin(kTwoPi * freq * (std::min(t, t_end) - t_start));
}

KeypointTrace gen_keypoint_trace(const EventSpec& spec, std::uint64_t seed, const SynthSettings& settings) {
  spec.validate();
  std::mt19937_64 rng(derive_seed(seed, kVideoStream));
  const auto frames = static_cast<std::size_t>(std::floor(settings.duration_s * settings.video_rate));
  if (frames < 2) throw PreconditionError("video duration too short");

  const double shift_x = uniform(rng, -100.0, 100.0);
  const double shift_y = uniform(rng, -30.0, 30.0);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::bernoulli_distribution dropout(std::clamp(settings.dropout_prob, 0.0, 1.0));
  const double c_lo = std::clamp(settings.confidence - 0.05, 0.01, 1.0);
  const double c_hi = std::clamp(settings.confidence + 0.05, c_lo, 1.0);

  std::vector<double> times(frames);
  std::vector<KeypointFrame> out(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    times[f] = static_cast<double>(f) / settings.video_rate;
    const double scene_t = times[f] - spec.clock_offset_s;
    const double motion = spec.amplitude_px * activity_waveform(scene_t, spec.freq, spec.t_start, spec.t_end);
    for (std::size_t k = 0; k < kKeypointCount; ++k) {
      double x = kSkeleton[k][0] + shift_x + settings.jitter_px * jitter(rng);
      double y = kSkeleton[k][1] + shift_y + settings.jitter_px * jitter(rng);
      if (static_cast<int>(k) == spec.keypoint_id) (spec.axis == Axis::x ? x : y) += motion;
      double c = c_lo == c_hi ? c_lo : uniform(rng, c_lo, c_hi);
      out[f][k] = dropout(rng) ? Keypoint{0.0, 0.0, 0.0} : Keypoint{x, y, c};
    }
  }
  return KeypointTrace(std::move(times), std::move(out));
}

CsiComponents gen_csi_components(const EventSpec& spec, std::uint64_t seed, const SynthSettings& settings) {
  spec.validate();
  const std::size_t m = settings.csi_columns;
  if (m == 0) throw PreconditionError("CSI needs at least one column");
  if (!spec.csi_gain.empty() && spec.csi_gain.size() != m) {
    throw PreconditionError("csi_gain has " + std::to_string(spec.csi_gain.size()) + " entries for " +
                            std::to_string(m) + " columns");
  }
  const auto rows = static_cast<std::size_t>(std::floor(settings.duration_s * settings.csi_rate));
  if (rows < 2) throw PreconditionError("CSI duration too short");

  std::mt19937_64 rng(derive_seed(seed, kCsiStream));
  CsiComponents c;
  c.columns = m;
  c.dc.resize(m);
  std::vector<double> gain(m);
  for (std::size_t j = 0; j < m; ++j) {
    c.dc[j] = uniform(rng, 15.0, 30.0);
    gain[j] = spec.csi_gain.empty() ? uniform(rng, 0.1, 1.0) : spec.csi_gain[j];
  }
  for (std::size_t j = 1; j < m; ++j) {
    if (c.dc[j] * gain[j] > c.dc[c.reference_column] * gain[c.reference_column]) c.reference_column = j;
  }
  const double harmonic = std::pow(10.0, settings.harmonic_db / 20.0);
  const double ref_amp = c.dc[c.reference_column] * settings.modulation_depth * gain[c.reference_column];
  const double signal_power = ref_amp * ref_amp * (1.0 + harmonic * harmonic) / 2.0;
  const double sigma = std::isinf(spec.snr_db) ? 0.0 : std::sqrt(signal_power / std::pow(10.0, spec.snr_db / 10.0));

  const double period = 1.0 / settings.csi_rate;
  const double jitter = std::min(settings.packet_jitter_s, 0.45 * period);
  std::normal_distribution<double> noise(0.0, 1.0);
  c.timestamps.resize(rows);
  c.clean.resize(rows * m);
  c.noise.resize(rows * m);
  for (std::size_t r = 0; r < rows; ++r) {
    const double t = r == 0 ? 0.0 : static_cast<double>(r) * period + (jitter > 0 ? uniform(rng, -jitter, jitter) : 0.0);
    c.timestamps[r] = t;
    const double base = activity_waveform(t, spec.freq, spec.t_start, spec.t_end);
    const double phase = kTwoPi * spec.freq * (std::clamp(t, spec.t_start, spec.t_end) - spec.t_start);
    const double second = t < spec.t_start ? 0.0 : harmonic * std::sin(2.0 * phase);
    const double mod = settings.attenuation * (base + second + prelude_waveform(t, spec));
    for (std::size_t j = 0; j < m; ++j) {
      c.clean[r * m + j] = c.dc[j] * (1.0 + settings.modulation_depth * gain[j] * mod);
      c.noise[r * m + j] = sigma > 0.0 ? sigma * noise(rng) : 0.0;
    }
  }
  return c;
}

CsiTrace gen_csi_trace(const EventSpec& spec, std::uint64_t seed, const SynthSettings& settings) {
  auto c = gen_csi_components(spec, seed, settings);
  std::vector<double> amps(c.clean.size());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    double v = std::max(0.0, c.clean[i] + c.noise[i]);
    if (settings.csi_quantum > 0.0) v = std::round(v / settings.csi_quantum) * settings.csi_quantum;
    amps[i] = v;
  }
  return CsiTrace(std::move(c.timestamps), std::move(amps), c.columns);
}

SyntheticTrial gen_matched_pair(const EventSpec& spec, std::uint64_t seed, const SynthSettings& settings) {
  TrialGroundTruth truth{{spec.t_start, spec.t_end, spec.freq}, TrialLabel::matched, spec, spec, false};
  return {gen_keypoint_trace(spec, seed, settings), gen_csi_trace(spec, seed, settings), std::move(truth)};
}

SyntheticTrial gen_attack_pair(const EventSpec& video_spec, const EventSpec& csi_spec, std::uint64_t seed,
                               const SynthSettings& settings) {
  // Independent draws for the two sides: the loop was recorded at another time.
  const std::uint64_t video_seed = derive_seed(seed, kVideoStream, 0xA77ACC);
  const std::uint64_t csi_seed = derive_seed(seed, kCsiStream, 0xA77ACC);
  TrialGroundTruth truth{{csi_spec.t_start, csi_spec.t_end, csi_spec.freq},
                         TrialLabel::attack,
                         video_spec,
                         csi_spec,
                         video_spec == csi_spec};
  return {gen_keypoint_trace(video_spec, video_seed, settings), gen_csi_trace(csi_spec, csi_seed, settings),
          std::move(truth)};
}

WallDistance wall_distance_from_string(const std::string& s) {
  if (s == "near") return WallDistance::near;
  if (s == "middle") return WallDistance::middle;
  if (s == "far") return WallDistance::far;
  throw PreconditionError("distance class must be near, middle or far");
}

CsiTrace gen_wall_scenario(WallDistance distance, std::uint64_t seed, SynthSettings settings) {
  EventSpec spec;
  spec.freq = 1.0;
  spec.t_start = 10.0;
  spec.t_end = 30.0;
  spec.snr_db = 20.0;  // noise floor relative to the unobstructed modulation
  switch (distance) {
    case WallDistance::near:
      settings.attenuation = 0.5;
      break;
    case WallDistance::middle:
      settings.attenuation = 0.02;
      break;
    case WallDistance::far:
      settings.attenuation = 0.005;
      break;
  }
  return gen_csi_trace(spec, seed, settings);
}

void CorpusProtocol::validate() const {
  if (event_types.empty()) throw PreconditionError("protocol needs at least one event type");
  std::set<std::string> names;
  for (const auto& t : event_types) {
    if (t.name.empty() || !names.insert(t.name).second) throw PreconditionError("event type names must be unique");
    if (!(t.freq > 0.0)) throw PreconditionError("event type " + t.name + " needs freq > 0");
    if (t.keypoint_id < 0 || t.keypoint_id >= static_cast<int>(kKeypointCount)) {
      throw PreconditionError("event type " + t.name + " has an invalid keypoint_id");
    }
  }
  if (trials_per_type == 0) throw PreconditionError("trials_per_type must be >= 1");
  if (!(start_range_s[0] <= start_range_s[1]) || !(end_range_s[0] <= end_range_s[1]) ||
      !(start_range_s[1] < end_range_s[0])) {
    throw PreconditionError("start/end ranges must be ordered and non-overlapping");
  }
  if (!(end_range_s[1] < settings.duration_s)) throw PreconditionError("end range must finish before the trace does");
  if (!(prelude_probability >= 0.0 && prelude_probability <= 1.0)) {
    throw PreconditionError("prelude_probability must be in [0,1]");
  }
  if (!(prelude_range_s[0] <= prelude_range_s[1]) || prelude_range_s[0] < 0.0 ||
      prelude_range_s[1] > start_range_s[0]) {
    throw PreconditionError("prelude range must be ordered and fit before the earliest start");
  }
  if (!(min_quiet_lead_s >= 0.0)) throw PreconditionError("min_quiet_lead_s must be >= 0");
  if (!(prelude_freq_range_hz[0] > 0.0 && prelude_freq_range_hz[0] <= prelude_freq_range_hz[1])) {
    throw PreconditionError("prelude frequency range must be positive and ordered");
  }
  if (settings.csi_columns == 0 || !(settings.csi_rate > 0.0) || !(settings.video_rate > 0.0)) {
    throw PreconditionError("settings need columns >= 1 and positive rates");
  }
}

CorpusProtocol protocol_from_json(const nlohmann::json& j) {
  CorpusProtocol p;
  std::vector<std::string> errors;
  detail::JsonReader r(j, "protocol", errors);
  if (const auto* types = r.child("event_types")) {
    if (!types->is_array()) {
      errors.push_back("protocol.event_types: expected an array");
    } else {
      p.event_types.clear();
      for (std::size_t i = 0; i < types->size(); ++i) {
        const std::string where = "protocol.event_types[" + std::to_string(i) + "]";
        detail::JsonReader tr((*types)[i], where, errors);
        EventType t;
        std::string axis = "y";
        tr.read("name", t.name);
        tr.read_number("freq", t.freq);
        tr.read("keypoint_id", t.keypoint_id);
        tr.read("axis", axis);
        tr.read_number("amplitude_px", t.amplitude_px);
        tr.reject_unknown();
        t.axis = axis_from_string(axis, errors, where + ".axis");
        p.event_types.push_back(t);
      }
    }
  }
  r.read("trials_per_type", p.trials_per_type);
  r.read("start_range_s", p.start_range_s);
  r.read("end_range_s", p.end_range_s);
  r.read_number("snr_db", p.snr_db);
  r.read_number("prelude_probability", p.prelude_probability);
  r.read("prelude_range_s", p.prelude_range_s);
  r.read("prelude_freq_range_hz", p.prelude_freq_range_hz);
  r.read_number("min_quiet_lead_s", p.min_quiet_lead_s);
  r.read("cross_pair_attacks", p.cross_pair_attacks);
  if (const auto* s = r.child("settings")) {
    detail::JsonReader sr(*s, "protocol.settings", errors);
    auto& st = p.settings;
    sr.read_number("duration_s", st.duration_s);
    sr.read_number("video_rate", st.video_rate);
    sr.read_number("csi_rate", st.csi_rate);
    sr.read("csi_columns", st.csi_columns);
    sr.read_number("modulation_depth", st.modulation_depth);
    sr.read_number("harmonic_db", st.harmonic_db);
    sr.read_number("jitter_px", st.jitter_px);
    sr.read_number("dropout_prob", st.dropout_prob);
    sr.read_number("confidence", st.confidence);
    sr.read_number("packet_jitter_s", st.packet_jitter_s);
    sr.read_number("csi_quantum", st.csi_quantum);
    sr.reject_unknown();
  }
  r.reject_unknown();
  if (errors.empty()) {
    try {
      p.validate();
    } catch (const PreconditionError& e) {
      errors.push_back(e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "invalid protocol:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ParseError(msg);
  }
  return p;
}

nlohmann::json protocol_to_json(const CorpusProtocol& p) {
  nlohmann::json types = nlohmann::json::array();
  for (const auto& t : p.event_types) {
    types.push_back({{"name", t.name},
                     {"freq", t.freq},
                     {"keypoint_id", t.keypoint_id},
                     {"axis", t.axis == Axis::x ? "x" : "y"},
                     {"amplitude_px", t.amplitude_px}});
  }
  const auto& s = p.settings;
  return {{"event_types", types},
          {"trials_per_type", p.trials_per_type},
          {"start_range_s", p.start_range_s},
          {"end_range_s", p.end_range_s},
          {"snr_db", number_or_inf(p.snr_db)},
          {"prelude_probability", p.prelude_probability},
          {"prelude_range_s", p.prelude_range_s},
          {"prelude_freq_range_hz", p.prelude_freq_range_hz},
          {"min_quiet_lead_s", p.min_quiet_lead_s},
          {"cross_pair_attacks", p.cross_pair_attacks},
          {"settings",
           {{"duration_s", s.duration_s},
            {"video_rate", s.video_rate},
            {"csi_rate", s.csi_rate},
            {"csi_columns", s.csi_columns},
            {"modulation_depth", s.modulation_depth},
            {"harmonic_db", s.harmonic_db},
            {"jitter_px", s.jitter_px},
            {"dropout_prob", s.dropout_prob},
            {"confidence", s.confidence},
            {"packet_jitter_s", s.packet_jitter_s},
            {"csi_quantum", s.csi_quantum}}}};
}

nlohmann::json manifest_entry_to_json(const ManifestEntry& e) {
  auto truth = [](const EventTruth& t) {
    return nlohmann::json{{"t_start", t.t_start}, {"t_end", t.t_end}, {"freq", t.freq}};
  };
  nlohmann::json j{{"trial_id", e.trial_id},   {"video_path", e.video_path}, {"csi_path", e.csi_path},
                   {"label", to_string(e.label)}, {"truth", truth(e.truth)},     {"seed", e.seed},
                   {"video_type", e.video_type}, {"csi_type", e.csi_type}};
  if (e.label == TrialLabel::attack) {
    j["video_truth"] = truth(e.video_truth);
    j["video_seed"] = e.video_seed;
  }
  return j;
}

ManifestEntry manifest_entry_from_json(const nlohmann::json& j) {
  try {
    ManifestEntry e;
    auto truth = [](const nlohmann::json& t) {
      return EventTruth{t.at("t_start").get<double>(), t.at("t_end").get<double>(), t.at("freq").get<double>()};
    };
    e.trial_id = j.at("trial_id").get<std::string>();
    e.video_path = j.at("video_path").get<std::string>();
    e.csi_path = j.at("csi_path").get<std::string>();
    e.label = trial_label_from_string(j.at("label").get<std::string>());
    e.truth = truth(j.at("truth"));
    e.seed = j.at("seed").get<std::uint64_t>();
    e.video_type = j.value("video_type", std::string{});
    e.csi_type = j.value("csi_type", e.video_type);
    e.video_truth = j.contains("video_truth") ? truth(j.at("video_truth")) : e.truth;
    e.video_seed = j.value("video_seed", e.seed);
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed manifest entry: ") + ex.what());
  }
}

CorpusSummary gen_corpus(const CorpusProtocol& protocol, const std::filesystem::path& out_dir, std::uint64_t seed,
                         unsigned threads) {
  protocol.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir / "trials", ec);
  if (ec) throw Error("cannot create corpus directory " + out_dir.string() + ": " + ec.message());

  struct Planned {
    ManifestEntry entry;
    EventSpec spec;
  };
  std::vector<Planned> trials;
  for (std::size_t ti = 0; ti < protocol.event_types.size(); ++ti) {
    const auto& type = protocol.event_types[ti];
    for (std::size_t i = 0; i < protocol.trials_per_type; ++i) {
      const std::uint64_t trial_seed = derive_seed(seed, ti + 1, i + 1);
      std::mt19937_64 rng(derive_seed(trial_seed, kTrialStream));
      EventSpec spec;
      spec.freq = type.freq;
      spec.keypoint_id = type.keypoint_id;
      spec.axis = type.axis;
      spec.amplitude_px = type.amplitude_px;
      spec.snr_db = protocol.snr_db;
      spec.t_start = uniform(rng, protocol.start_range_s[0], protocol.start_range_s[1]);
      spec.t_end = uniform(rng, protocol.end_range_s[0], protocol.end_range_s[1]);
      if (uniform(rng, 0.0, 1.0) < protocol.prelude_probability) {
        const double drawn = uniform(rng, protocol.prelude_range_s[0], protocol.prelude_range_s[1]);
        spec.csi_prelude_s = std::clamp(spec.t_start - protocol.min_quiet_lead_s, 0.0, drawn);
        spec.csi_prelude_freq = uniform(rng, protocol.prelude_freq_range_hz[0], protocol.prelude_freq_range_hz[1]);
      }
      char name[64];
      std::snprintf(name, sizeof name, "%s_%03zu", type.name.c_str(), i);
      ManifestEntry e;
      e.trial_id = name;
      e.video_path = std::string("trials/") + name + ".video.jsonl";
      e.csi_path = std::string("trials/") + name + ".csi.csv";
      e.label = TrialLabel::matched;
      e.truth = {spec.t_start, spec.t_end, spec.freq};
      e.video_truth = e.truth;
      e.seed = e.video_seed = trial_seed;
      e.video_type = e.csi_type = type.name;
      trials.push_back({e, spec});
    }
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(trials.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < trials.size(); i = next++) {
      try {
        const auto& t = trials[i];
        auto pair = gen_matched_pair(t.spec, t.entry.seed, protocol.settings);
        std::ostringstream video, csi;
        write_keypoint_trace(video, pair.video);
        write_csi_trace(csi, pair.csi, CsiFormat::csv);
        write_file(out_dir / t.entry.video_path, video.str());
        write_file(out_dir / t.entry.csi_path, csi.str());
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(trials.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CorpusSummary summary;
  summary.matched = trials.size();
  summary.files = 2 * trials.size();
  summary.pairing_rule =
      protocol.cross_pair_attacks
          ? "attack = (video of trial a, CSI of trial b) for every ordered pair of distinct event types "
            "(A, B) and every a in A, b in B; count = sum over A != B of |A|*|B|"
          : "no attack pairs";

  std::string manifest;
  for (const auto& t : trials) manifest += manifest_entry_to_json(t.entry).dump() + "\n";
  if (protocol.cross_pair_attacks) {
    for (const auto& v : trials) {
      for (const auto& c : trials) {
        if (v.entry.video_type == c.entry.csi_type) continue;
        ManifestEntry e;
        e.trial_id = "attack_" + v.entry.trial_id + "__" + c.entry.trial_id;
        e.video_path = v.entry.video_path;
        e.csi_path = c.entry.csi_path;
        e.label = TrialLabel::attack;
        e.truth = c.entry.truth;
        e.video_truth = v.entry.truth;
        e.seed = c.entry.seed;
        e.video_seed = v.entry.seed;
        e.video_type = v.entry.video_type;
        e.csi_type = c.entry.csi_type;
        manifest += manifest_entry_to_json(e).dump() + "\n";
        ++summary.attack;
      }
    }
  }
  write_file(out_dir / kManifestName, manifest);

  nlohmann::json info{{"seed", seed},
                      {"protocol", protocol_to_json(protocol)},
                      {"matched_trials", summary.matched},
                      {"attack_trials", summary.attack},
                      {"trace_files", summary.files},
                      {"pairing_rule", summary.pairing_rule}};
  write_file(out_dir / kCorpusInfoName, info.dump(2) + "\n");
  return summary;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& corpus_dir) {
  const auto path = corpus_dir / kManifestName;
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      entries.push_back(manifest_entry_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed manifest line: ") + e.what(), lineno);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return entries;
}

}  // namespace surfi::synth
