#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "surfi/config.hpp"
#include "surfi/pipeline.hpp"

namespace surfi::cli {

enum class Format { json, csv };

Format format_from_string(const std::string& s);

// Exit codes: 0 legitimate / success, 2 looped, 1 operational failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitLooped = 2;

inline constexpr std::uint64_t kDefaultSeed = 1;

nlohmann::json detection_report_json(const DetectionReport& report);
nlohmann::json error_json(const std::string& kind, const std::string& message);

// Each command writes its report to `out` (errors as a JSON object) and
// returns the process exit code.
int cmd_detect(const std::string& video_path, const std::string& csi_path, const Settings& settings, Format format,
               std::ostream& out);
int cmd_synth(const std::optional<std::string>& protocol_path, const std::string& out_dir, std::uint64_t seed,
              unsigned threads, Format format, std::ostream& out);
int cmd_calibrate(const std::string& corpus_dir, std::optional<double> target_fpr, const Settings& settings,
                  std::uint64_t seed, Format format, std::ostream& out);
int cmd_eval(const std::string& corpus_dir, const Settings& settings, const std::string& out_csv, std::uint64_t seed,
             Format format, std::ostream& out);

}  // namespace surfi::cli
