#include <cstdlib>
#include <fstream>
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <spdlog/spdlog.h>

#include "surfi/cli.hpp"
#include "surfi/config.hpp"
#include "surfi/error.hpp"
#include "surfi/pipeline.hpp"
#include "surfi/preprocess.hpp"
#include "surfi/spectral.hpp"
#include "surfi/synth.hpp"

namespace py = pybind11;

namespace {

surfi::Settings settings_from(const std::optional<std::string>& config_json) {
  if (!config_json) return {};
  return surfi::settings_from_json(nlohmann::json::parse(*config_json));
}

surfi::AttributeTriple triple(const py::dict& d) {
  surfi::AttributeTriple t;
  auto get = [&](const char* key) -> std::optional<double> {
    if (!d.contains(key) || d[key].is_none()) return std::nullopt;
    return d[key].cast<double>();
  };
  t.tau_start = get("tau_start");
  t.tau_end = get("tau_end");
  t.freq = get("freq");
  return t;
}

template <typename Fn>
std::pair<int, std::string> capture(Fn&& fn) {
  std::ostringstream out;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = fn(out);
  }
  return {code, out.str()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("SURFI_LOG")) {
    auto level = spdlog::level::from_str(env);
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
  m.doc() = "Looping-attack detection core";

  // Translators run newest first, so the base class goes first.
  py::register_exception<surfi::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<surfi::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<surfi::PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<surfi::NoPeakError>(m, "NoPeakError", PyExc_ValueError);

  m.def("fft_half_magnitudes", [](const std::vector<double>& x) { return surfi::fft_half_magnitudes(x); },
        py::arg("window"));
  m.def("motion_energy", [](const std::vector<double>& x) { return surfi::motion_energy(x); }, py::arg("window"));
  m.def(
      "motion_energy_series",
      [](const std::vector<double>& x, double rate, double window_s) {
        return surfi::motion_energy_series(surfi::UniformSeries(rate, x), window_s).values;
      },
      py::arg("samples"), py::arg("rate"), py::arg("window_s") = 0.1);
  m.def(
      "prominent_frequency",
      [](const std::vector<double>& x, double rate, double low_hz, double high_hz) {
        auto p = surfi::prominent_frequency(surfi::UniformSeries(rate, x), {low_hz, high_hz});
        return py::make_tuple(p.frequency, p.magnitude);
      },
      py::arg("samples"), py::arg("rate"), py::arg("low_hz"), py::arg("high_hz"));
  m.def(
      "dwt_denoise",
      [](const std::vector<double>& x, double rate, const std::string& wavelet, int levels) {
        auto y = surfi::dwt_denoise(surfi::UniformSeries(rate, x), {wavelet, levels});
        return std::vector<double>(y.samples().begin(), y.samples().end());
      },
      py::arg("samples"), py::arg("rate"), py::arg("wavelet") = "db4", py::arg("levels") = 4);
  m.def(
      "compare",
      [](const py::dict& video, const py::dict& csi, double t_start, double t_end, double t_freq) {
        auto v = surfi::compare({triple(video), triple(csi)}, {t_start, t_end, t_freq});
        return py::make_tuple(v.per_attribute, v.score);
      },
      py::arg("video"), py::arg("csi"), py::arg("t_start") = 2.5, py::arg("t_end") = 2.0, py::arg("t_freq") = 0.25);
  m.def(
      "decide",
      [](const std::vector<int>& scores, double threshold) {
        auto d = surfi::decide(scores, threshold);
        return py::make_tuple(d.mean_score, surfi::to_string(d.verdict));
      },
      py::arg("scores"), py::arg("threshold"));
  m.def(
      "calibrate_decision_threshold",
      [](const std::vector<double>& means, double target) {
        auto c = surfi::calibrate_decision_threshold(means, target);
        return py::make_tuple(c.threshold, c.empirical_fpr, c.undersampled);
      },
      py::arg("legit_means"), py::arg("target_fpr"));

  m.def(
      "write_synthetic_pair",
      [](const std::string& video_path, const std::string& csi_path, std::uint64_t seed, double video_freq,
         double csi_freq, double t_start, double t_end, double snr_db, std::size_t columns) {
        surfi::synth::SynthSettings settings;
        settings.csi_columns = columns;
        surfi::synth::EventSpec video;
        video.freq = video_freq;
        video.t_start = t_start;
        video.t_end = t_end;
        video.snr_db = snr_db;
        auto csi = video;
        csi.freq = csi_freq;
        auto trial = video_freq == csi_freq ? surfi::synth::gen_matched_pair(video, seed, settings)
                                            : surfi::synth::gen_attack_pair(video, csi, seed, settings);
        std::ofstream v(video_path), c(csi_path);
        if (!v || !c) throw surfi::Error("cannot write synthetic pair");
        surfi::write_keypoint_trace(v, trial.video);
        surfi::write_csi_trace(c, trial.csi, surfi::csi_format_from_path(csi_path));
        return surfi::synth::to_string(trial.truth.label);
      },
      py::arg("video_path"), py::arg("csi_path"), py::arg("seed"), py::arg("video_freq") = 0.6,
      py::arg("csi_freq") = 0.6, py::arg("t_start") = 5.0, py::arg("t_end") = 25.0, py::arg("snr_db") = 20.0,
      py::arg("columns") = 10);

  namespace cli = surfi::cli;
  m.def(
      "cmd_detect",
      [](const std::string& video, const std::string& csi, std::optional<std::string> config_json) {
        auto settings = settings_from(config_json);
        return capture([&](std::ostream& out) { return cli::cmd_detect(video, csi, settings, cli::Format::json, out); });
      },
      py::arg("video_path"), py::arg("csi_path"), py::arg("config_json") = py::none());
  m.def(
      "cmd_synth",
      [](const std::string& out_dir, std::uint64_t seed, std::optional<std::string> protocol_path, unsigned threads) {
        return capture([&](std::ostream& out) {
          return cli::cmd_synth(protocol_path, out_dir, seed, threads, cli::Format::json, out);
        });
      },
      py::arg("out_dir"), py::arg("seed") = cli::kDefaultSeed, py::arg("protocol_path") = py::none(),
      py::arg("threads") = 1);
  m.def(
      "cmd_calibrate",
      [](const std::string& corpus, double target, std::uint64_t seed, std::optional<std::string> config_json) {
        auto settings = settings_from(config_json);
        return capture([&](std::ostream& out) {
          return cli::cmd_calibrate(corpus, target, settings, seed, cli::Format::json, out);
        });
      },
      py::arg("corpus_dir"), py::arg("target_fpr"), py::arg("seed") = cli::kDefaultSeed,
      py::arg("config_json") = py::none());
  m.def(
      "cmd_eval",
      [](const std::string& corpus, const std::string& out_csv, std::uint64_t seed,
         std::optional<std::string> config_json) {
        auto settings = settings_from(config_json);
        return capture(
            [&](std::ostream& out) { return cli::cmd_eval(corpus, settings, out_csv, seed, cli::Format::json, out); });
      },
      py::arg("corpus_dir"), py::arg("out_csv"), py::arg("seed") = cli::kDefaultSeed,
      py::arg("config_json") = py::none());
}
