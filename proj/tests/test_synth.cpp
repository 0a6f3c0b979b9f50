#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "oracle.hpp"
#include "surfi/error.hpp"
#include "surfi/pipeline.hpp"
#include "surfi/synth.hpp"

using namespace surfi;
using namespace surfi::synth;

namespace {

SynthSettings small_settings() {
  SynthSettings s;
  s.csi_columns = 8;
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Synth, SameSeedIsBitIdentical) {
  EventSpec spec;
  auto a = gen_matched_pair(spec, 99, small_settings());
  auto b = gen_matched_pair(spec, 99, small_settings());
  EXPECT_EQ(a.video, b.video);
  EXPECT_EQ(a.csi, b.csi);
  auto c = gen_matched_pair(spec, 100, small_settings());
  EXPECT_FALSE(a.csi == c.csi);
}

TEST(Synth, TraceShapes) {
  EventSpec spec;
  SynthSettings s;
  s.duration_s = 12.0;
  spec.t_end = 10.0;
  auto trial = gen_matched_pair(spec, 1, s);
  EXPECT_EQ(trial.csi.columns(), 90u);
  // Median of jittered packet gaps; its spread is about 2 Hz at this length.
  EXPECT_NEAR(trial.csi.nominal_rate(), 1000.0, 10.0);
  EXPECT_NEAR(trial.video.frame_rate(), 30.0, 1e-6);
  EXPECT_EQ(trial.truth.label, TrialLabel::matched);
  EXPECT_FALSE(trial.truth.degenerate);
}

TEST(Synth, KeypointFollowsActivity) {
  EventSpec spec;
  SynthSettings s = small_settings();
  s.jitter_px = 0.0;
  s.dropout_prob = 0.0;
  auto trace = gen_keypoint_trace(spec, 4, s);
  const auto& frames = trace.frames();
  const auto times = trace.frame_times();
  const double y0 = frames[0][7].y;
  for (std::size_t f = 0; f < frames.size(); f += 7) {
    const double expected = y0 + spec.amplitude_px * activity_waveform(times[f], spec.freq, spec.t_start, spec.t_end);
    EXPECT_NEAR(frames[f][7].y, expected, 1e-9) << times[f];
    EXPECT_DOUBLE_EQ(frames[f][3].x, frames[0][3].x);
  }
}

TEST(Synth, ActivityWaveform) {
  EXPECT_EQ(activity_waveform(4.0, 1.0, 5.0, 25.0), 0.0);
  EXPECT_NEAR(activity_waveform(5.25, 1.0, 5.0, 25.0), 1.0, 1e-12);
  EXPECT_NEAR(activity_waveform(30.0, 0.6, 5.0, 25.0), activity_waveform(25.0, 0.6, 5.0, 25.0), 1e-12);
}

TEST(Synth, SnrIsHonest) {
  for (double snr : {10.0, 20.0}) {
    EventSpec spec;
    spec.snr_db = snr;
    auto c = gen_csi_components(spec, 31, small_settings());
    const std::size_t j = c.reference_column;
    // Event interior, whole number of periods of the 0.6 Hz activity.
    const std::size_t r0 = 6000, r1 = r0 + 5000;
    std::vector<double> clean, noise;
    for (std::size_t r = r0; r < r1; ++r) {
      clean.push_back(c.clean[r * c.columns + j]);
      noise.push_back(c.noise[r * c.columns + j]);
    }
    double mean = 0.0;
    for (double v : clean) mean += v;
    mean /= clean.size();
    for (double& v : clean) v -= mean;
    // Signal power from its in-band DFT bins; noise power over the full band.
    auto S = test::brute_dft(clean);
    auto N = test::brute_dft(noise);
    const double n = static_cast<double>(clean.size());
    double ps = 0.0, pn = 0.0;
    for (std::size_t k = 1; k < clean.size(); ++k) {
      const double f = std::min(k, clean.size() - k) * 1000.0 / n;
      if (f >= 0.3 && f <= 10.0) ps += std::norm(S[k]);
    }
    for (std::size_t k = 0; k < noise.size(); ++k) pn += std::norm(N[k]);
    const double measured = 10.0 * std::log10(ps / pn);
    EXPECT_NEAR(measured, snr, 1.0);
  }
}

TEST(Synth, InfiniteSnrHasNoNoise) {
  EventSpec spec;
  spec.snr_db = std::numeric_limits<double>::infinity();
  auto c = gen_csi_components(spec, 1, small_settings());
  for (double v : c.noise) ASSERT_EQ(v, 0.0);
}

TEST(Synth, InvalidSpecsThrow) {
  EventSpec spec;
  spec.t_start = 30.0;
  EXPECT_THROW(gen_matched_pair(spec, 1, small_settings()), PreconditionError);
  spec = {};
  spec.freq = 0.0;
  EXPECT_THROW(gen_csi_trace(spec, 1, small_settings()), PreconditionError);
  spec = {};
  spec.keypoint_id = 25;
  EXPECT_THROW(gen_keypoint_trace(spec, 1, small_settings()), PreconditionError);
  spec = {};
  spec.csi_gain = {1.0, 2.0};
  EXPECT_THROW(gen_csi_trace(spec, 1, small_settings()), PreconditionError);
}

TEST(Synth, AttackPairUsesIndependentSides) {
  EventSpec video, csi;
  video.freq = 0.6;
  csi.freq = 1.0;
  auto attack = gen_attack_pair(video, csi, 5, small_settings());
  EXPECT_EQ(attack.truth.label, TrialLabel::attack);
  EXPECT_DOUBLE_EQ(attack.truth.truth.freq, 1.0);
  EXPECT_FALSE(attack.truth.degenerate);
  EXPECT_EQ(attack.truth.video_spec, video);
  EXPECT_EQ(attack.truth.csi_spec, csi);
}

TEST(Synth, TrialLengthsFollowProtocol) {
  CorpusProtocol p;
  p.trials_per_type = 4;
  p.cross_pair_attacks = false;
  test::TempDir dir("lengths");
  gen_corpus(p, dir.path(), 3);
  for (const auto& e : read_manifest(dir.path())) {
    const double len = e.truth.t_end - e.truth.t_start;
    EXPECT_GE(len, 10.0);
    EXPECT_LE(len, 30.0);
    EXPECT_GE(e.truth.t_start, 5.0);
    EXPECT_LE(e.truth.t_start, 15.0);
  }
}

TEST(Corpus, CountsAndManifestConsistency) {
  CorpusProtocol p;
  p.trials_per_type = 3;
  p.settings.duration_s = 40.0;
  test::TempDir dir("corpus");
  auto summary = gen_corpus(p, dir.path(), 7, 2);
  EXPECT_EQ(summary.matched, 9u);
  // Cross pairing: every video trial of type a with every CSI trial of type b != a.
  EXPECT_EQ(summary.attack, 3u * 2u * 3u * 3u);
  auto manifest = read_manifest(dir.path());
  EXPECT_EQ(manifest.size(), summary.matched + summary.attack);

  std::set<std::string> referenced;
  std::map<std::pair<std::string, std::string>, int> per_pair;
  for (const auto& e : manifest) {
    referenced.insert(e.video_path);
    referenced.insert(e.csi_path);
    EXPECT_TRUE(std::filesystem::exists(dir.path() / e.video_path)) << e.video_path;
    EXPECT_TRUE(std::filesystem::exists(dir.path() / e.csi_path)) << e.csi_path;
    if (e.label == TrialLabel::attack) {
      EXPECT_NE(e.video_type, e.csi_type);
      ++per_pair[{e.video_type, e.csi_type}];
    }
  }
  for (const auto& [pair, count] : per_pair) EXPECT_EQ(count, 9);
  std::size_t on_disk = 0;
  for (const auto& f : std::filesystem::directory_iterator(dir.path() / "trials")) {
    ++on_disk;
    EXPECT_TRUE(referenced.count(std::filesystem::relative(f.path(), dir.path()).string())) << f.path();
  }
  EXPECT_EQ(on_disk, referenced.size());
  EXPECT_EQ(on_disk, 2u * summary.matched);
  EXPECT_EQ(on_disk, summary.files);
}

TEST(Corpus, DefaultProtocolCountsWithoutWriting) {
  CorpusProtocol p;
  EXPECT_EQ(p.event_types.size() * p.trials_per_type, 90u);
  EXPECT_EQ(p.trials_per_type * p.trials_per_type, 900u);
}

TEST(Corpus, ThreadCountDoesNotChangeFiles) {
  CorpusProtocol p;
  p.trials_per_type = 2;
  test::TempDir a("seq"), b("par");
  gen_corpus(p, a.path(), 11, 1);
  gen_corpus(p, b.path(), 11, 3);
  for (const auto& f : std::filesystem::recursive_directory_iterator(a.path())) {
    if (!f.is_regular_file()) continue;
    auto rel = std::filesystem::relative(f.path(), a.path());
    ASSERT_EQ(slurp(f.path()), slurp(b.path() / rel)) << rel;
  }
}

TEST(Corpus, BadProtocolListsEveryProblem) {
  nlohmann::json j = {{"trials_per_type", -1}, {"snr_db", "loud"}, {"bogus", 1}};
  try {
    protocol_from_json(j);
    FAIL();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("trials_per_type"), std::string::npos) << msg;
    EXPECT_NE(msg.find("snr_db"), std::string::npos) << msg;
    EXPECT_NE(msg.find("bogus"), std::string::npos) << msg;
  }
}

TEST(Corpus, ProtocolJsonRoundTrip) {
  CorpusProtocol p;
  p.trials_per_type = 7;
  p.prelude_probability = 0.0;
  auto q = protocol_from_json(protocol_to_json(p));
  EXPECT_EQ(protocol_to_json(q), protocol_to_json(p));
}

TEST(Corpus, ManifestErrorsCarryLineNumbers) {
  test::TempDir dir("manifest");
  {
    std::ofstream out(dir / kManifestName);
    ManifestEntry e{"E1_000", "trials/a.video.jsonl", "trials/a.csi.csv", TrialLabel::matched, {5, 25, 0.6}, 1, "E1",
                    "E1",     {5, 25, 0.6},          1};
    out << manifest_entry_to_json(e).dump() << "\n{\"trial_id\":3}\n";
  }
  try {
    read_manifest(dir.path());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Wall, AttenuationByDistance) {
  for (auto [cls, expect_event] : {std::pair{WallDistance::far, false}, std::pair{WallDistance::middle, false},
                                   std::pair{WallDistance::near, true}}) {
    auto trace = gen_wall_scenario(cls, 5, small_settings());
    auto events = analyze_csi(trace).events;
    EXPECT_EQ(!events.empty(), expect_event) << static_cast<int>(cls);
  }
  EXPECT_THROW(wall_distance_from_string("roof"), PreconditionError);
}

TEST(Seeds, DeriveSeedSeparatesStreams) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
}
