#include "surfi/trace_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include <nlohmann/json.hpp>

#include "surfi/error.hpp"

namespace surfi {

namespace {

double median_rate(std::span<const double> times) {
  if (times.size() < 2) return 0.0;
  std::vector<double> dt(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) dt[i - 1] = times[i] - times[i - 1];
  auto mid = dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2);
  std::nth_element(dt.begin(), mid, dt.end());
  double m = *mid;
  if (dt.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(dt.begin(), mid));
  }
  return 1.0 / m;
}

void check_times(std::span<const double> times, const char* what) {
  if (times.empty()) throw ParseError(std::string(what) + ": empty trace");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) {
      throw ParseError(std::string(what) + ": non-finite timestamp", i + 1);
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw ParseError(std::string(what) + ": timestamps not strictly increasing", i + 1);
    }
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("malformed number '" + std::string(field) + "'", line);
  }
  return v;
}

void append_number(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

double json_number(const nlohmann::json& j, const char* key, std::size_t line) {
  if (!j.is_number()) throw ParseError(std::string("field '") + key + "' is not a number", line);
  return j.get<double>();
}

CsiTrace parse_csi_jsonl(std::istream& in) {
  std::vector<double> times;
  std::vector<double> amps;
  std::size_t columns = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed JSON record: ") + e.what(), lineno);
    }
    if (!rec.is_object() || !rec.contains("t") || !rec.contains("a")) {
      throw ParseError("record must be an object with fields 't' and 'a'", lineno);
    }
    const auto& a = rec["a"];
    if (!a.is_array() || a.empty()) throw ParseError("field 'a' must be a non-empty array", lineno);
    if (times.empty()) {
      columns = a.size();
    } else if (a.size() != columns) {
      throw ParseError("inconsistent column count: expected " + std::to_string(columns) + ", got " +
                           std::to_string(a.size()),
                       lineno);
    }
    times.push_back(json_number(rec["t"], "t", lineno));
    for (const auto& v : a) amps.push_back(json_number(v, "a", lineno));
  }
  if (times.empty()) throw ParseError("empty CSI stream");
  return CsiTrace(std::move(times), std::move(amps), columns);
}

CsiTrace parse_csi_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::string_view rest = trim(line);
    std::size_t field = 0;
    while (true) {
      auto comma = rest.find(',');
      auto name = trim(rest.substr(0, comma));
      std::string expected = field == 0 ? "t" : "a" + std::to_string(field - 1);
      if (name != expected) {
        throw ParseError("bad CSV header: expected '" + expected + "', got '" + std::string(name) + "'",
                         lineno);
      }
      ++field;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    columns = field - 1;
    if (columns == 0) throw ParseError("CSV header has no amplitude columns", lineno);
    break;
  }
  if (columns == 0) throw ParseError("empty CSI stream");

  std::vector<double> times;
  std::vector<double> amps;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest = trim(line);
    if (rest.empty()) continue;
    std::size_t field = 0;
    while (true) {
      auto comma = rest.find(',');
      double v = parse_number(rest.substr(0, comma), lineno);
      if (field == 0) {
        times.push_back(v);
      } else {
        if (field > columns) {
          throw ParseError("inconsistent column count: expected " + std::to_string(columns), lineno);
        }
        amps.push_back(v);
      }
      ++field;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (field != columns + 1) {
      throw ParseError("inconsistent column count: expected " + std::to_string(columns) + ", got " +
                           std::to_string(field - 1),
                       lineno);
    }
  }
  if (times.empty()) throw ParseError("empty CSI stream");
  return CsiTrace(std::move(times), std::move(amps), columns);
}

}  // namespace

std::string SeriesOrigin::label() const {
  switch (kind) {
    case Kind::keypoint:
      return "kp" + std::to_string(index) + (axis == Axis::x ? ".x" : ".y");
    case Kind::subcarrier:
      return "sc" + std::to_string(index);
    case Kind::derived:
      break;
  }
  return "derived";
}

UniformSeries::UniformSeries(double rate, std::vector<double> samples, SeriesOrigin origin, double t0)
    : rate_(rate), samples_(std::move(samples)), origin_(origin), t0_(t0) {
  if (!(rate_ > 0.0) || !std::isfinite(rate_)) throw PreconditionError("series rate must be > 0");
  if (!std::isfinite(t0_)) throw PreconditionError("series t0 must be finite");
  for (double v : samples_) {
    if (!std::isfinite(v)) throw PreconditionError("series samples must be finite");
  }
}

UniformSeries UniformSeries::slice(double start_s, double end_s) const {
  auto index_of = [&](double t) {
    double i = std::ceil((t - t0_) * rate_ - 1e-9);
    return static_cast<std::size_t>(std::clamp(i, 0.0, static_cast<double>(samples_.size())));
  };
  std::size_t lo = index_of(start_s);
  std::size_t hi = std::max(lo, index_of(end_s));
  return UniformSeries(rate_, std::vector<double>(samples_.begin() + lo, samples_.begin() + hi), origin_,
                       time_at(lo));
}

CsiTrace::CsiTrace(std::vector<double> timestamps, std::vector<double> amplitudes, std::size_t columns)
    : timestamps_(std::move(timestamps)), amplitudes_(std::move(amplitudes)), columns_(columns) {
  check_times(timestamps_, "CSI trace");
  if (columns_ == 0) throw ParseError("CSI trace needs at least one column");
  if (amplitudes_.size() != timestamps_.size() * columns_) {
    throw ParseError("CSI amplitude matrix is not rows x columns");
  }
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    double v = amplitudes_[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw ParseError("CSI amplitudes must be finite and >= 0", i / columns_ + 1);
    }
  }
  nominal_rate_ = median_rate(timestamps_);
}

std::vector<double> CsiTrace::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = amplitudes_[r * columns_ + c];
  return out;
}

KeypointTrace::KeypointTrace(std::vector<double> frame_times, std::vector<KeypointFrame> frames)
    : frame_times_(std::move(frame_times)), frames_(std::move(frames)) {
  check_times(frame_times_, "keypoint trace");
  if (frames_.size() != frame_times_.size()) throw ParseError("keypoint frame count mismatch");
  for (std::size_t f = 0; f < frames_.size(); ++f) {
    for (const auto& kp : frames_[f]) {
      if (!std::isfinite(kp.x) || !std::isfinite(kp.y)) {
        throw ParseError("keypoint coordinates must be finite", f + 1);
      }
      if (!(kp.confidence >= 0.0 && kp.confidence <= 1.0)) {
        throw ParseError("keypoint confidence must be in [0,1]", f + 1);
      }
    }
  }
  frame_rate_ = median_rate(frame_times_);
}

CsiFormat csi_format_from_path(const std::string& path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends_with(".csv") ? CsiFormat::csv : CsiFormat::jsonl;
}

CsiTrace parse_csi_trace(std::istream& in, CsiFormat format) {
  return format == CsiFormat::csv ? parse_csi_csv(in) : parse_csi_jsonl(in);
}

KeypointTrace parse_keypoint_trace(std::istream& in) {
  std::vector<double> times;
  std::vector<KeypointFrame> frames;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed JSON record: ") + e.what(), lineno);
    }
    if (!rec.is_object() || !rec.contains("t") || !rec.contains("kp")) {
      throw ParseError("record must be an object with fields 't' and 'kp'", lineno);
    }
    const auto& kp = rec["kp"];
    if (!kp.is_array() || kp.size() != kKeypointCount) {
      throw ParseError("expected " + std::to_string(kKeypointCount) + " keypoints, got " +
                           std::to_string(kp.is_array() ? kp.size() : 0),
                       lineno);
    }
    KeypointFrame frame;
    for (std::size_t k = 0; k < kKeypointCount; ++k) {
      const auto& triple = kp[k];
      if (!triple.is_array() || triple.size() != 3) {
        throw ParseError("keypoint " + std::to_string(k) + " must be an [x,y,c] triple", lineno);
      }
      frame[k] = {json_number(triple[0], "x", lineno), json_number(triple[1], "y", lineno),
                  json_number(triple[2], "c", lineno)};
      if (!(frame[k].confidence >= 0.0 && frame[k].confidence <= 1.0)) {
        throw ParseError("keypoint confidence must be in [0,1]", lineno);
      }
    }
    times.push_back(json_number(rec["t"], "t", lineno));
    if (times.size() > 1 && !(times.back() > times[times.size() - 2])) {
      throw ParseError("frame times not strictly increasing", lineno);
    }
    frames.push_back(frame);
  }
  if (frames.empty()) throw ParseError("empty keypoint stream");
  return KeypointTrace(std::move(times), std::move(frames));
}

CsiTrace read_csi_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open CSI trace: " + path);
  return parse_csi_trace(in, csi_format_from_path(path));
}

KeypointTrace read_keypoint_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open keypoint trace: " + path);
  return parse_keypoint_trace(in);
}

void write_csi_trace(std::ostream& out, const CsiTrace& trace, CsiFormat format) {
  std::string buf;
  if (format == CsiFormat::csv) {
    buf = "t";
    for (std::size_t c = 0; c < trace.columns(); ++c) buf += ",a" + std::to_string(c);
    buf += '\n';
  }
  for (std::size_t r = 0; r < trace.rows(); ++r) {
    auto row = trace.row(r);
    if (format == CsiFormat::csv) {
      append_number(buf, trace.timestamps()[r]);
      for (double v : row) {
        buf += ',';
        append_number(buf, v);
      }
    } else {
      buf += "{\"t\":";
      append_number(buf, trace.timestamps()[r]);
      buf += ",\"a\":[";
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) buf += ',';
        append_number(buf, row[c]);
      }
      buf += "]}";
    }
    buf += '\n';
    if (buf.size() > (1u << 20)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

void write_keypoint_trace(std::ostream& out, const KeypointTrace& trace) {
  std::string buf;
  for (std::size_t f = 0; f < trace.size(); ++f) {
    buf = "{\"t\":";
    append_number(buf, trace.frame_times()[f]);
    buf += ",\"kp\":[";
    const auto& frame = trace.frames()[f];
    for (std::size_t k = 0; k < kKeypointCount; ++k) {
      if (k) buf += ',';
      buf += '[';
      append_number(buf, frame[k].x);
      buf += ',';
      append_number(buf, frame[k].y);
      buf += ',';
      append_number(buf, frame[k].confidence);
      buf += ']';
    }
    buf += "]}\n";
    out << buf;
  }
}

UniformSeries resample_uniform(std::span<const double> timestamps, std::span<const double> values,
                               double target_rate, SeriesOrigin origin) {
  if (timestamps.size() != values.size()) throw PreconditionError("timestamps and values differ in length");
  if (timestamps.size() < 2) throw PreconditionError("resampling needs at least 2 points");
  if (!(target_rate > 0.0)) throw PreconditionError("target rate must be > 0");
  const double t0 = timestamps.front();
  const double span = timestamps.back() - t0;
  if (!(span > 0.0)) throw PreconditionError("resampling needs a non-zero time span");

  const auto count = static_cast<std::size_t>(std::floor(span * target_rate + 1e-9)) + 1;
  std::vector<double> out(count);
  std::size_t j = 0;
  for (std::size_t i = 0; i < count; ++i) {
    double t = std::min(t0 + static_cast<double>(i) / target_rate, timestamps.back());
    while (j + 2 < timestamps.size() && timestamps[j + 1] < t) ++j;
    double ta = timestamps[j], tb = timestamps[j + 1];
    double w = std::clamp((t - ta) / (tb - ta), 0.0, 1.0);
    out[i] = values[j] + w * (values[j + 1] - values[j]);
  }
  return UniformSeries(target_rate, std::move(out), origin, t0);
}

}  // namespace surfi
