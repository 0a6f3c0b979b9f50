#include "surfi/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <spdlog/spdlog.h>

#include "surfi/error.hpp"
#include "surfi/evaluation.hpp"
#include "surfi/synth.hpp"

namespace surfi::cli {

namespace {

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : ""; }

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json triple_json(const AttributeTriple& t) {
  return {{"tau_start", opt_json(t.tau_start)}, {"tau_end", opt_json(t.tau_end)}, {"freq", opt_json(t.freq)}};
}

// Maps an exception to an error object and exit code 1.
int fail(std::ostream& out, const std::exception& e) {
  std::string kind = "internal";
  if (dynamic_cast<const ParseError*>(&e)) {
    kind = "parse";
  } else if (dynamic_cast<const PreconditionError*>(&e)) {
    kind = "precondition";
  } else if (dynamic_cast<const NoPeakError*>(&e)) {
    kind = "pipeline";
  } else if (dynamic_cast<const Error*>(&e)) {
    kind = "io";
  } else if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) {
    kind = "io";
  }
  spdlog::error("{}", e.what());
  out << error_json(kind, e.what()).dump(2) << "\n";
  return kExitError;
}

std::string detection_csv(const DetectionReport& r) {
  std::string out =
      "event,window_start,window_end,video_tau_start,video_tau_end,video_freq,csi_tau_start,csi_tau_end,csi_freq,"
      "as1,as2,as3,score\n";
  for (std::size_t i = 0; i < r.events.size(); ++i) {
    const auto& e = r.events[i];
    const auto& v = e.attributes.video;
    const auto& c = e.attributes.csi;
    out += std::to_string(i) + "," + num(e.window.start_s) + "," + num(e.window.end_s) + "," + opt_num(v.tau_start) +
           "," + opt_num(v.tau_end) + "," + opt_num(v.freq) + "," + opt_num(c.tau_start) + "," + opt_num(c.tau_end) +
           "," + opt_num(c.freq) + "," + std::to_string(e.verdict.per_attribute[0]) + "," +
           std::to_string(e.verdict.per_attribute[1]) + "," + std::to_string(e.verdict.per_attribute[2]) + "," +
           std::to_string(e.verdict.score) + "\n";
  }
  return out;
}

}  // namespace

Format format_from_string(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  throw PreconditionError("format must be json or csv");
}

nlohmann::json error_json(const std::string& kind, const std::string& message) {
  return {{"error", {{"kind", kind}, {"message", message}}}};
}

nlohmann::json detection_report_json(const DetectionReport& r) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : r.events) {
    events.push_back({{"window", {{"start_s", e.window.start_s}, {"end_s", e.window.end_s}}},
                      {"video", triple_json(e.attributes.video)},
                      {"csi", triple_json(e.attributes.csi)},
                      {"per_attribute", e.verdict.per_attribute},
                      {"score", e.verdict.score},
                      {"notes", e.notes}});
  }
  nlohmann::json j{
      {"csi",
       {{"selected_column", r.csi.selected_column},
        {"selection_energy", r.csi.selection_energy},
        {"energy_samples", r.csi.energy.values.size()}}},
      {"video",
       {{"selected_series", r.video.series.origin().label()},
        {"selection_score", r.video.selection.score},
        {"candidates", r.video.candidates}}},
      {"events", events},
      {"warnings", r.warnings},
  };
  if (r.decision) {
    j["decision"] = {{"mean_score", r.decision->mean_score},
                     {"threshold", r.decision->threshold},
                     {"n_events", r.decision->n_events},
                     {"verdict", to_string(r.decision->verdict)}};
  } else {
    j["decision"] = nullptr;
  }
  return j;
}

int cmd_detect(const std::string& video_path, const std::string& csi_path, const Settings& settings, Format format,
               std::ostream& out) {
  try {
    spdlog::info("detect: video={} csi={}", video_path, csi_path);
    auto video = read_keypoint_trace(video_path);
    auto csi = read_csi_trace(csi_path);
    auto report = run_detection(video, csi, settings.pipeline);
    for (const auto& w : report.warnings) spdlog::warn("{}", w);
    if (!report.decision) {
      auto j = error_json("no_events", "no activity event was detected in the CSI trace; nothing to compare");
      j["report"] = detection_report_json(report);
      out << j.dump(2) << "\n";
      return kExitError;
    }
    if (format == Format::csv) {
      out << detection_csv(report);
    } else {
      out << detection_report_json(report).dump(2) << "\n";
    }
    return report.decision->verdict == Verdict::legitimate ? kExitOk : kExitLooped;
  } catch (const std::exception& e) {
    return fail(out, e);
  }
}

int cmd_synth(const std::optional<std::string>& protocol_path, const std::string& out_dir, std::uint64_t seed,
              unsigned threads, Format format, std::ostream& out) {
  try {
    synth::CorpusProtocol protocol;
    if (protocol_path) {
      std::ifstream in(*protocol_path);
      if (!in) throw Error("cannot open protocol: " + *protocol_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(*protocol_path + ": " + e.what());
      }
      protocol = synth::protocol_from_json(j);
    }
    spdlog::info("synth: writing corpus to {} (seed {})", out_dir, seed);
    auto s = synth::gen_corpus(protocol, out_dir, seed, threads);
    if (format == Format::csv) {
      out << "matched,attack,trace_files\n" << s.matched << "," << s.attack << "," << s.files << "\n";
    } else {
      out << nlohmann::json{{"out_dir", out_dir},
                            {"seed", seed},
                            {"matched", s.matched},
                            {"attack", s.attack},
                            {"trace_files", s.files},
                            {"pairing_rule", s.pairing_rule}}
                 .dump(2)
          << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(out, e);
  }
}

int cmd_calibrate(const std::string& corpus_dir, std::optional<double> target_fpr, const Settings& settings,
                  std::uint64_t seed, Format format, std::ostream& out) {
  try {
    const double target = target_fpr ? *target_fpr : settings.pipeline.target_fpr.value_or(0.001);
    if (!(target > 0.0 && target < 1.0)) {
      throw PreconditionError("target FPR must lie in (0, 1); 0 is not achievable as an empirical quantile");
    }
    spdlog::info("calibrate: scoring {}", corpus_dir);
    auto trials = score_corpus(corpus_dir, settings.pipeline);
    auto table = calibrate_corpus(trials, target, settings.eval, seed);
    for (const auto& w : table.warnings) spdlog::warn("{}", w);
    if (format == Format::csv) {
      out << "n,threshold,empirical_fpr,sequences,undersampled\n";
      for (const auto& [n, c] : table.per_n) {
        out << n << "," << num(c.threshold) << "," << num(c.empirical_fpr) << "," << c.samples << ","
            << (c.undersampled ? 1 : 0) << "\n";
      }
    } else {
      out << threshold_table_json(table).dump(2) << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(out, e);
  }
}

int cmd_eval(const std::string& corpus_dir, const Settings& settings, const std::string& out_csv, std::uint64_t seed,
             Format format, std::ostream& out) {
  try {
    spdlog::info("eval: scoring {}", corpus_dir);
    auto trials = score_corpus(corpus_dir, settings.pipeline);
    spdlog::info("eval: scored {} trials", trials.size());
    auto report = evaluate(std::move(trials), settings.eval, seed);
    for (const auto& w : report.warnings) spdlog::warn("{}", w);
    auto paths = write_eval_csvs(report, out_csv);
    if (format == Format::csv) {
      out << tpr_csv(report);
    } else {
      auto j = eval_report_json(report);
      nlohmann::json files = nlohmann::json::array();
      for (const auto& p : paths) files.push_back(p.string());
      j["outputs"] = files;
      out << j.dump(2) << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(out, e);
  }
}

}  // namespace surfi::cli
