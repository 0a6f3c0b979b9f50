#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surfi/config.hpp"
#include "surfi/pipeline.hpp"
#include "surfi/synth.hpp"

namespace surfi {

// Pipeline outcome for one manifest entry.
struct TrialScore {
  std::string trial_id;
  synth::TrialLabel label = synth::TrialLabel::matched;
  std::string video_type;
  std::string csi_type;
  std::vector<int> scores;  // one per detected CSI event
  bool degenerate = false;  // attack whose two halves share an event type

  bool has_events() const { return !scores.empty(); }
  double mean_score() const;
};

// Runs the pipeline on every manifest entry. Each trace file is analysed
// once; entries are scored in parallel and returned in manifest order.
std::vector<TrialScore> score_corpus(const std::filesystem::path& corpus_dir, const PipelineConfig& cfg);

// Sequence means for n-event sequences drawn from `pool` (trial means).
// n = 1 returns the pool itself; n >= 2 draws `count` sequences, each of n
// distinct trials, from a generator seeded with `seed`.
std::vector<double> sequence_means(const std::vector<double>& pool, std::size_t n, std::size_t count,
                                   std::uint64_t seed);

struct EvalCell {
  std::size_t n = 0;
  double target_fpr = 0.0;
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr_calibration = 0.0;
  double fpr_holdout = 0.0;
  bool undersampled = false;
};

struct SequenceSet {
  std::size_t n = 0;
  std::vector<double> calibration;
  std::vector<double> holdout;
  std::vector<double> attack;
};

struct ScoreSummary {
  std::string event_type;  // the video side's type
  synth::TrialLabel label = synth::TrialLabel::matched;
  std::size_t trials = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

struct EvalReport {
  std::uint64_t seed = 0;
  std::vector<TrialScore> trials;
  std::size_t legit_without_events = 0;
  std::size_t attack_without_events = 0;
  std::vector<SequenceSet> sequences;  // index n - 1
  std::vector<EvalCell> cells;         // ordered by n, then target FPR
  std::vector<ScoreSummary> summaries;
  std::string split_rule;
  std::vector<std::string> warnings;
};

// Splits legitimate trials by manifest position (even -> calibration,
// odd -> holdout), draws sequences for n = 1..max_events and calibrates one
// threshold per (n, target FPR) on the calibration half.
EvalReport evaluate(std::vector<TrialScore> trials, const EvalOptions& opts, std::uint64_t seed);

nlohmann::json eval_report_json(const EvalReport& report);
std::string tpr_csv(const EvalReport& report);
std::string scores_csv(const EvalReport& report);
std::string cdf_csv(const EvalReport& report);

// Writes out_csv (TPR per n and target FPR) plus <stem>_scores.csv and
// <stem>_cdf.csv next to it. Returns the paths written.
std::vector<std::filesystem::path> write_eval_csvs(const EvalReport& report, const std::filesystem::path& out_csv);

struct ThresholdTable {
  double target_fpr = 0.0;
  std::size_t trials = 0;
  std::size_t trials_without_events = 0;
  std::vector<std::pair<std::size_t, CalibrationResult>> per_n;
  std::vector<std::string> warnings;
};

// Calibrates on every legitimate trial of the corpus.
ThresholdTable calibrate_corpus(const std::vector<TrialScore>& trials, double target_fpr, const EvalOptions& opts,
                                std::uint64_t seed);
nlohmann::json threshold_table_json(const ThresholdTable& table);

}  // namespace surfi
