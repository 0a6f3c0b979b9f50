#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "oracle.hpp"
#include "surfi/cli.hpp"
#include "surfi/synth.hpp"

using namespace surfi;

namespace {

synth::SynthSettings small_settings() {
  synth::SynthSettings s;
  s.csi_columns = 6;
  return s;
}

void write_trial(const synth::SyntheticTrial& t, const std::string& video, const std::string& csi) {
  std::ofstream v(video), c(csi);
  write_keypoint_trace(v, t.video);
  write_csi_trace(c, t.csi, csi_format_from_path(csi));
}

class CliTest : public ::testing::Test {
 protected:
  test::TempDir dir{"cli"};
};

}  // namespace

TEST_F(CliTest, DetectMatchedIsLegitimate) {
  auto trial = synth::gen_matched_pair({}, 41, small_settings());
  write_trial(trial, dir / "m.video.jsonl", dir / "m.csi.csv");
  std::ostringstream out;
  const int code = cli::cmd_detect(dir / "m.video.jsonl", dir / "m.csi.csv", {}, cli::Format::json, out);
  EXPECT_EQ(code, cli::kExitOk) << out.str();
  auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["decision"]["verdict"], "legitimate");
  EXPECT_EQ(j["events"].size(), 1u);
}

TEST_F(CliTest, DetectAttackIsLooped) {
  synth::EventSpec video, csi;
  video.freq = 0.6;
  csi.freq = 1.0;
  csi.keypoint_id = 4;
  // The loop was recorded at another time, so its timing differs too.
  csi.t_start = 9.0;
  csi.t_end = 31.0;
  auto trial = synth::gen_attack_pair(video, csi, 42, small_settings());
  write_trial(trial, dir / "a.video.jsonl", dir / "a.csi.jsonl");
  std::ostringstream out;
  const int code = cli::cmd_detect(dir / "a.video.jsonl", dir / "a.csi.jsonl", {}, cli::Format::json, out);
  EXPECT_EQ(code, cli::kExitLooped) << out.str();
}

TEST_F(CliTest, DetectCsvFormat) {
  auto trial = synth::gen_matched_pair({}, 43, small_settings());
  write_trial(trial, dir / "m.video.jsonl", dir / "m.csi.csv");
  std::ostringstream out;
  EXPECT_EQ(cli::cmd_detect(dir / "m.video.jsonl", dir / "m.csi.csv", {}, cli::Format::csv, out), cli::kExitOk);
  EXPECT_NE(out.str().find(','), std::string::npos);
}

TEST_F(CliTest, MissingFileNamesPath) {
  std::ostringstream out;
  const std::string missing = dir / "nope.video.jsonl";
  EXPECT_EQ(cli::cmd_detect(missing, dir / "nope.csi.csv", {}, cli::Format::json, out), cli::kExitError);
  auto j = nlohmann::json::parse(out.str());
  ASSERT_TRUE(j.contains("error"));
  EXPECT_NE(j["error"]["message"].get<std::string>().find(missing), std::string::npos);
}

TEST_F(CliTest, SynthRejectsBadProtocol) {
  {
    std::ofstream p(dir / "p.json");
    p << R"({"trials_per_type": "many", "unknown": 1})";
  }
  std::ostringstream out;
  EXPECT_EQ(cli::cmd_synth(dir / "p.json", dir / "corpus", 1, 1, cli::Format::json, out), cli::kExitError);
  auto j = nlohmann::json::parse(out.str());
  const std::string msg = j["error"]["message"];
  EXPECT_NE(msg.find("trials_per_type"), std::string::npos);
  EXPECT_NE(msg.find("unknown"), std::string::npos);
}

TEST_F(CliTest, SmallCorpusCalibrateAndEval) {
  {
    std::ofstream p(dir / "p.json");
    p << R"({"trials_per_type": 4, "settings": {"csi_columns": 4}})";
  }
  std::ostringstream out;
  ASSERT_EQ(cli::cmd_synth(dir / "p.json", dir / "corpus", 5, 1, cli::Format::json, out), cli::kExitOk) << out.str();

  std::ostringstream cal;
  EXPECT_EQ(cli::cmd_calibrate(dir / "corpus", 0.001, {}, 1, cli::Format::json, cal), cli::kExitOk) << cal.str();
  auto j = nlohmann::json::parse(cal.str());
  EXPECT_FALSE(j["warnings"].empty());

  std::ostringstream zero;
  EXPECT_EQ(cli::cmd_calibrate(dir / "corpus", 0.0, {}, 1, cli::Format::json, zero), cli::kExitError);

  Settings s;
  s.eval.sequences = 50;
  std::ostringstream ev;
  EXPECT_EQ(cli::cmd_eval(dir / "corpus", s, dir / "eval.csv", 1, cli::Format::json, ev), cli::kExitOk) << ev.str();
  EXPECT_TRUE(std::filesystem::exists(dir / "eval.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "eval_scores.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "eval_cdf.csv"));
}

TEST_F(CliTest, EmptyCorpusIsAnError) {
  std::filesystem::create_directories(dir.path() / "empty");
  std::ostringstream out;
  EXPECT_EQ(cli::cmd_calibrate(dir / "empty", 0.01, {}, 1, cli::Format::json, out), cli::kExitError);
}

TEST(CliFormat, Parse) {
  EXPECT_EQ(cli::format_from_string("json"), cli::Format::json);
  EXPECT_EQ(cli::format_from_string("csv"), cli::Format::csv);
  EXPECT_ANY_THROW(cli::format_from_string("xml"));
}
