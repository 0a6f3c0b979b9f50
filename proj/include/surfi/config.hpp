#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surfi/pipeline.hpp"

namespace surfi {

// Multi-event evaluation knobs.
struct EvalOptions {
  std::size_t max_events = 5;
  std::size_t sequences = 2000;  // per (n, label) for n >= 2; n = 1 uses every trial
  std::vector<double> target_fprs{0.001, 0.005, 0.009};
};

struct Settings {
  PipelineConfig pipeline;
  EvalOptions eval;
};

// Missing keys keep their defaults; unknown keys and bad values are reported
// together in one ParseError.
Settings settings_from_json(const nlohmann::json& j);
nlohmann::json settings_to_json(const Settings& s);
Settings load_settings(const std::string& path);

// Throws PreconditionError describing the first invalid field.
void validate(const PipelineConfig& cfg);
void validate(const EvalOptions& opts);

}  // namespace surfi
