#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surfi/trace_model.hpp"

namespace surfi::synth {

// One scripted activity. Times are on the CSI clock; the video clock runs
// `clock_offset_s` ahead of it.
struct EventSpec {
  double freq = 0.6;
  double t_start = 5.0;
  double t_end = 25.0;
  int keypoint_id = 7;  // BODY_25 left wrist
  Axis axis = Axis::y;
  double amplitude_px = 40.0;
  std::vector<double> csi_gain;  // per subcarrier; empty = drawn from the seed
  double snr_db = 20.0;          // +inf disables CSI noise
  double clock_offset_s = 0.0;
  // Optional CSI-only motion right before the activity (someone settling in
  // out of the camera's view). 0 disables it.
  double csi_prelude_s = 0.0;
  double csi_prelude_freq = 1.2;

  void validate() const;
  friend bool operator==(const EventSpec&, const EventSpec&) = default;
};

struct SynthSettings {
  double duration_s = 40.0;
  double video_rate = 30.0;
  double csi_rate = 1000.0;
  std::size_t csi_columns = 90;
  double modulation_depth = 0.1;  // relative to each subcarrier's DC level
  double harmonic_db = -10.0;     // second harmonic level
  double attenuation = 1.0;       // scales the modulation, not the noise floor
  double jitter_px = 0.5;
  double dropout_prob = 0.02;
  double confidence = 0.9;
  double packet_jitter_s = 2e-4;
  double csi_quantum = 0.0;  // > 0 rounds amplitudes to this step
};

struct EventTruth {
  double t_start = 0.0;
  double t_end = 0.0;
  double freq = 0.0;
};

enum class TrialLabel { matched, attack };

std::string to_string(TrialLabel label);
TrialLabel trial_label_from_string(const std::string& s);

struct TrialGroundTruth {
  EventTruth truth;  // what actually happened (the CSI side)
  TrialLabel label = TrialLabel::matched;
  EventSpec video_spec;
  EventSpec csi_spec;
  bool degenerate = false;  // attack whose two specs are identical
};

struct SyntheticTrial {
  KeypointTrace video;
  CsiTrace csi;
  TrialGroundTruth truth;
};

// Noise-free CSI and the additive noise, kept apart so SNR can be measured.
struct CsiComponents {
  std::vector<double> timestamps;
  std::vector<double> clean;  // rows x columns
  std::vector<double> noise;  // rows x columns
  std::vector<double> dc;     // per column
  std::size_t columns = 0;
  std::size_t reference_column = 0;  // column the SNR is defined on
};

// Displacement shape shared by both modalities: 0 before t_start,
// sin(2πf(t - t_start)) during the event, held at its final value afterwards.
double activity_waveform(double t, double freq, double t_start, double t_end);

KeypointTrace gen_keypoint_trace(const EventSpec& spec, std::uint64_t seed, const SynthSettings& settings = {});
CsiComponents gen_csi_components(const EventSpec& spec, std::uint64_t seed, const SynthSettings& settings = {});
CsiTrace gen_csi_trace(const EventSpec& spec, std::uint64_t seed, const SynthSettings& settings = {});

SyntheticTrial gen_matched_pair(const EventSpec& spec, std::uint64_t seed, const SynthSettings& settings = {});
SyntheticTrial gen_attack_pair(const EventSpec& video_spec, const EventSpec& csi_spec, std::uint64_t seed,
                               const SynthSettings& settings = {});

enum class WallDistance { near, middle, far };

WallDistance wall_distance_from_string(const std::string& s);

// Activity in a corridor behind a wall; only the modulation is attenuated.
CsiTrace gen_wall_scenario(WallDistance distance, std::uint64_t seed, SynthSettings settings = {});

struct EventType {
  std::string name;
  double freq = 0.0;
  int keypoint_id = 7;
  Axis axis = Axis::y;
  double amplitude_px = 40.0;
};

struct CorpusProtocol {
  std::vector<EventType> event_types{
      {"E1", 0.6, 7, Axis::y, 40.0},
      {"E2", 1.0, 4, Axis::y, 30.0},
      {"E3", 1.6, 4, Axis::x, 25.0},
  };
  std::size_t trials_per_type = 30;
  std::array<double, 2> start_range_s{5.0, 15.0};
  std::array<double, 2> end_range_s{25.0, 35.0};
  double snr_db = 20.0;
  double prelude_probability = 0.25;
  std::array<double, 2> prelude_range_s{1.5, 4.0};
  std::array<double, 2> prelude_freq_range_hz{0.8, 2.0};
  // The prelude is shortened so that at least this much quiet precedes it;
  // the CSI detector needs a motionless baseline to trigger on.
  double min_quiet_lead_s = 4.0;
  bool cross_pair_attacks = true;
  SynthSettings settings = default_corpus_settings();

  static SynthSettings default_corpus_settings() {
    SynthSettings s;
    s.csi_columns = 10;
    s.csi_quantum = 1e-3;
    return s;
  }

  void validate() const;
};

CorpusProtocol protocol_from_json(const nlohmann::json& j);
nlohmann::json protocol_to_json(const CorpusProtocol& p);

struct ManifestEntry {
  std::string trial_id;
  std::string video_path;  // relative to the corpus directory
  std::string csi_path;
  TrialLabel label = TrialLabel::matched;
  EventTruth truth;
  std::uint64_t seed = 0;
  std::string video_type;
  std::string csi_type;
  EventTruth video_truth;
  std::uint64_t video_seed = 0;
};

nlohmann::json manifest_entry_to_json(const ManifestEntry& e);
ManifestEntry manifest_entry_from_json(const nlohmann::json& j);

inline constexpr const char* kManifestName = "manifest.jsonl";
inline constexpr const char* kCorpusInfoName = "corpus.json";

struct CorpusSummary {
  std::size_t matched = 0;
  std::size_t attack = 0;
  std::size_t files = 0;
  std::string pairing_rule;
};

// Writes trials/<type>_<i>.video.jsonl and .csi.csv, manifest.jsonl and
// corpus.json under `out_dir`. Output is identical for any thread count.
CorpusSummary gen_corpus(const CorpusProtocol& protocol, const std::filesystem::path& out_dir, std::uint64_t seed,
                         unsigned threads = 1);

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& corpus_dir);

// Per-trial seed derivation (splitmix64 over the inputs).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace surfi::synth
