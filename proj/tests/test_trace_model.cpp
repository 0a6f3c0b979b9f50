#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracle.hpp"
#include "surfi/error.hpp"
#include "surfi/trace_model.hpp"

using namespace surfi;

namespace {

std::string keypoint_line(double t, double fill_conf) {
  std::string kp;
  for (int i = 0; i < 25; ++i) kp += std::string(i ? "," : "") + "[1,2," + std::to_string(fill_conf) + "]";
  return "{\"t\":" + std::to_string(t) + ",\"kp\":[" + kp + "]}\n";
}

}  // namespace

TEST(ParseCsi, MinimalJsonl) {
  std::istringstream in("{\"t\":0.000,\"a\":[1.0,1.0]}\n{\"t\":0.001,\"a\":[1.0,1.0]}\n");
  auto trace = parse_csi_trace(in, CsiFormat::jsonl);
  EXPECT_EQ(trace.rows(), 2u);
  EXPECT_EQ(trace.columns(), 2u);
  EXPECT_DOUBLE_EQ(trace.timestamps()[1], 0.001);
}

TEST(ParseCsi, NinetyColumns) {
  std::string line = "{\"t\":0,\"a\":[";
  for (int i = 0; i < 90; ++i) line += std::string(i ? "," : "") + "2.5";
  std::string second = line;
  second.replace(second.find("\"t\":0"), 5, "\"t\":0.001");
  std::istringstream in(line + "]}\n" + second + "]}\n");
  EXPECT_EQ(parse_csi_trace(in, CsiFormat::jsonl).columns(), 90u);
}

TEST(ParseCsi, InconsistentColumnsReportsLine) {
  std::istringstream in("{\"t\":0,\"a\":[1,2,3]}\n{\"t\":0.001,\"a\":[1,2]}\n");
  try {
    parse_csi_trace(in, CsiFormat::jsonl);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("column"), std::string::npos);
  }
}

TEST(ParseCsi, RejectsBadInput) {
  std::istringstream empty("");
  EXPECT_THROW(parse_csi_trace(empty, CsiFormat::jsonl), ParseError);
  std::istringstream backwards("{\"t\":0.002,\"a\":[1]}\n{\"t\":0.001,\"a\":[1]}\n");
  EXPECT_THROW(parse_csi_trace(backwards, CsiFormat::jsonl), ParseError);
  std::istringstream negative("{\"t\":0,\"a\":[-1]}\n{\"t\":0.001,\"a\":[1]}\n");
  EXPECT_THROW(parse_csi_trace(negative, CsiFormat::jsonl), ParseError);
  std::istringstream garbage("{\"t\":0,\"a\":[1]}\nnot json\n");
  try {
    parse_csi_trace(garbage, CsiFormat::jsonl);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(ParseCsi, Csv) {
  std::istringstream in("t,a0,a1\n0,1,2\n0.001,3,4\n");
  auto trace = parse_csi_trace(in, CsiFormat::csv);
  EXPECT_EQ(trace.rows(), 2u);
  EXPECT_EQ(trace.columns(), 2u);
  EXPECT_DOUBLE_EQ(trace.at(1, 1), 4.0);
  std::istringstream ragged("t,a0,a1\n0,1,2\n0.001,3\n");
  EXPECT_THROW(parse_csi_trace(ragged, CsiFormat::csv), ParseError);
}

TEST(ParseCsi, FormatFromPath) {
  EXPECT_EQ(csi_format_from_path("x/trial.csi.csv"), CsiFormat::csv);
  EXPECT_EQ(csi_format_from_path("trial.jsonl"), CsiFormat::jsonl);
}

TEST(CsiTrace, RoundTripsThroughBothFormats) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> amp(0.0, 40.0);
  std::vector<double> t, a;
  for (int r = 0; r < 50; ++r) {
    t.push_back(r * 0.001 + (r ? 1e-5 * (r % 3) : 0.0));
    for (int c = 0; c < 4; ++c) a.push_back(amp(rng));
  }
  CsiTrace trace(t, a, 4);
  for (auto fmt : {CsiFormat::jsonl, CsiFormat::csv}) {
    std::stringstream buf;
    write_csi_trace(buf, trace, fmt);
    EXPECT_EQ(parse_csi_trace(buf, fmt), trace);
  }
}

TEST(ParseKeypoints, AllMissingFramesAreValid) {
  std::istringstream in(keypoint_line(0.0, 0.0) + keypoint_line(1.0 / 30, 0.0));
  auto trace = parse_keypoint_trace(in);
  EXPECT_EQ(trace.size(), 2u);
  EXPECT_FALSE(trace.frames()[0][3].detected());
}

TEST(ParseKeypoints, WrongKeypointCount) {
  std::string kp;
  for (int i = 0; i < 24; ++i) kp += std::string(i ? "," : "") + "[1,2,0.9]";
  std::istringstream in("{\"t\":0,\"kp\":[" + kp + "]}\n");
  EXPECT_THROW(parse_keypoint_trace(in), ParseError);
}

TEST(ParseKeypoints, InfersFrameRate) {
  std::string text;
  for (int f = 0; f < 30; ++f) text += keypoint_line(f / 30.0, 0.9);
  std::istringstream in(text);
  EXPECT_NEAR(parse_keypoint_trace(in).frame_rate(), 30.0, 1e-3);
}

TEST(ParseKeypoints, RejectsEmptyAndBackwards) {
  std::istringstream empty("\n\n");
  EXPECT_THROW(parse_keypoint_trace(empty), ParseError);
  std::istringstream backwards(keypoint_line(0.1, 0.9) + keypoint_line(0.0, 0.9));
  EXPECT_THROW(parse_keypoint_trace(backwards), ParseError);
}

TEST(ParseKeypoints, RoundTrip) {
  std::string text;
  for (int f = 0; f < 5; ++f) text += keypoint_line(f / 30.0, f == 2 ? 0.0 : 0.75);
  std::istringstream in(text);
  auto trace = parse_keypoint_trace(in);
  std::stringstream buf;
  write_keypoint_trace(buf, trace);
  EXPECT_EQ(parse_keypoint_trace(buf), trace);
}

TEST(ReadTrace, MissingFileNamesPath) {
  try {
    read_csi_trace("/nonexistent/trial.csi.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/trial.csi.csv"), std::string::npos);
  }
}

TEST(Resample, LinearInterpolation) {
  std::vector<double> t{0.0, 1.0}, v{0.0, 10.0};
  auto s = resample_uniform(t, v, 2.0);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_DOUBLE_EQ(s.samples()[0], 0.0);
  EXPECT_DOUBLE_EQ(s.samples()[1], 5.0);
  EXPECT_DOUBLE_EQ(s.samples()[2], 10.0);
}

TEST(Resample, UniformInputIsUnchanged) {
  std::vector<double> t(200), v = test::gaussian(200, 9);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = i / 100.0;
  auto s = resample_uniform(t, v, 100.0);
  ASSERT_EQ(s.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(s.samples()[i], v[i], 1e-9);
}

TEST(Resample, JitteredTimestampsMatchTwoPointOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> jitter(-2e-4, 2e-4);
  std::vector<double> t(3000), v = test::gaussian(3000, 12);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = i * 1e-3 + (i ? jitter(rng) : 0.0);
  auto s = resample_uniform(t, v, 1000.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double g = s.time_at(i);
    auto hi = std::upper_bound(t.begin(), t.end(), g);
    std::size_t j = hi == t.end() ? t.size() - 1 : static_cast<std::size_t>(hi - t.begin());
    if (j == 0) j = 1;
    const double w = (g - t[j - 1]) / (t[j] - t[j - 1]);
    const double expected = g >= t.back() ? v.back() : v[j - 1] + w * (v[j] - v[j - 1]);
    ASSERT_NEAR(s.samples()[i], expected, 1e-9) << i;
  }
}

TEST(Resample, Preconditions) {
  std::vector<double> one{0.0}, vals{1.0};
  EXPECT_THROW(resample_uniform(one, vals, 10.0), PreconditionError);
  std::vector<double> same{1.0, 1.0}, two{1.0, 2.0};
  EXPECT_THROW(resample_uniform(same, two, 10.0), Error);
}

TEST(UniformSeries, SliceIsHalfOpenAndClipped) {
  UniformSeries s(10.0, std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {}, 1.0);
  auto a = s.slice(1.2, 1.5);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_DOUBLE_EQ(a.samples()[0], 2.0);
  EXPECT_DOUBLE_EQ(a.t0(), 1.2);
  EXPECT_EQ(s.slice(-5.0, 100.0).size(), 10u);
  EXPECT_THROW(UniformSeries(0.0, std::vector<double>{1.0}), PreconditionError);
  EXPECT_THROW(UniformSeries(1.0, std::vector<double>{NAN}), PreconditionError);
}

TEST(SeriesOrigin, Labels) {
  EXPECT_EQ(SeriesOrigin::keypoint(7, Axis::y).label(), "kp7.y");
  EXPECT_EQ(SeriesOrigin::subcarrier(12).label(), "sc12");
  EXPECT_EQ(SeriesOrigin{}.label(), "derived");
}
