#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "surfi/cli.hpp"
#include "surfi/config.hpp"
#include "surfi/error.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("surfi");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("SURFI_LOG")) {
    auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honour it when asked for.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  namespace cli = surfi::cli;

  CLI::App app{"Looping-attack detection from video keypoints and Wi-Fi CSI"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = cli::kDefaultSeed;
  std::string out_path;
  std::string format_name = "json";
  unsigned threads = 0;
  app.add_option("--config", config_path, "Pipeline config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Seed for synthesis and sequence sampling");
  app.add_option("--out", out_path, "Output path (report file, corpus directory or eval CSV)");
  app.add_option("--format", format_name, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", threads, "Worker threads (default: config value, or hardware concurrency)");

  std::string video_path, csi_path;
  auto* detect = app.add_subcommand("detect", "Score one video/CSI pair; exit 0 legitimate, 2 looped, 1 error");
  detect->add_option("video", video_path, "Keypoint trace (JSONL)")->required();
  detect->add_option("csi", csi_path, "CSI trace (JSONL or CSV)")->required();

  std::optional<std::string> protocol_path;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->add_option("--protocol", protocol_path, "Corpus protocol (JSON)");

  std::string corpus_dir;
  std::optional<double> target_fpr;
  auto* calibrate = app.add_subcommand("calibrate", "Calibrate decision thresholds on legitimate trials");
  calibrate->add_option("corpus", corpus_dir, "Corpus directory")->required();
  calibrate->add_option("--target-fpr", target_fpr, "Target false positive rate");

  auto* eval = app.add_subcommand("eval", "Evaluate TPR against event count and target FPR");
  eval->add_option("corpus", corpus_dir, "Corpus directory")->required();

  CLI11_PARSE(app, argc, argv);

  surfi::Settings settings;
  if (!config_path.empty()) {
    try {
      settings = surfi::load_settings(config_path);
    } catch (const std::exception& e) {
      std::cout << cli::error_json("config", e.what()).dump(2) << "\n";
      return cli::kExitError;
    }
  }
  if (threads > 0) {
    settings.pipeline.threads = threads;
  } else if (config_path.empty()) {
    settings.pipeline.threads = std::max(1u, std::thread::hardware_concurrency());
  }
  const auto format = cli::format_from_string(format_name);

  std::ofstream file;
  auto report_stream = [&]() -> std::ostream& {
    if (out_path.empty()) return std::cout;
    file.open(out_path, std::ios::binary);
    if (!file) {
      spdlog::error("cannot write {}", out_path);
      std::exit(cli::kExitError);
    }
    return file;
  };

  if (*detect) return cli::cmd_detect(video_path, csi_path, settings, format, report_stream());
  if (*synth) {
    return cli::cmd_synth(protocol_path, out_path.empty() ? "corpus" : out_path, seed, settings.pipeline.threads,
                          format, std::cout);
  }
  if (*calibrate) return cli::cmd_calibrate(corpus_dir, target_fpr, settings, seed, format, report_stream());
  return cli::cmd_eval(corpus_dir, settings, out_path.empty() ? "eval.csv" : out_path, seed, format, std::cout);
}
