#include "surfi/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>

#include "parallel.hpp"
#include "surfi/error.hpp"

namespace surfi {

namespace {

using synth::TrialLabel;

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double fraction_below(const std::vector<double>& values, double threshold) {
  if (values.empty()) return 0.0;
  auto below = std::count_if(values.begin(), values.end(), [&](double v) { return v < threshold; });
  return static_cast<double>(below) / static_cast<double>(values.size());
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

enum SequenceStream : std::uint64_t { kCalibration = 1, kHoldout = 2, kAttack = 3, kAllLegit = 4 };

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

double TrialScore::mean_score() const {
  if (scores.empty()) return 0.0;
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

std::vector<TrialScore> score_corpus(const std::filesystem::path& corpus_dir, const PipelineConfig& cfg) {
  const auto entries = synth::read_manifest(corpus_dir);
  if (entries.empty()) throw PreconditionError("corpus manifest is empty: " + corpus_dir.string());

  std::vector<std::string> csi_paths, video_paths;
  std::map<std::string, std::size_t> csi_index, video_index;
  std::vector<std::vector<std::size_t>> by_csi;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto [cit, cnew] = csi_index.emplace(entries[i].csi_path, csi_paths.size());
    if (cnew) {
      csi_paths.push_back(entries[i].csi_path);
      by_csi.emplace_back();
    }
    by_csi[cit->second].push_back(i);
    if (video_index.emplace(entries[i].video_path, video_paths.size()).second) {
      video_paths.push_back(entries[i].video_path);
    }
  }

  PipelineConfig inner = cfg;
  inner.threads = 1;
  std::vector<std::optional<CsiAnalysis>> csi(csi_paths.size());
  std::vector<std::optional<VideoAnalysis>> video(video_paths.size());
  auto with_path = [](const std::string& path, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      throw Error(path + ": " + e.what());
    }
  };
  detail::parallel_for(csi_paths.size(), cfg.threads, [&](std::size_t i) {
    const auto path = (corpus_dir / csi_paths[i]).string();
    with_path(path, [&] { csi[i] = analyze_csi(read_csi_trace(path), inner); });
  });
  detail::parallel_for(video_paths.size(), cfg.threads, [&](std::size_t i) {
    const auto path = (corpus_dir / video_paths[i]).string();
    with_path(path, [&] { video[i] = analyze_video(read_keypoint_trace(path), inner); });
  });

  std::vector<TrialScore> out(entries.size());
  detail::parallel_for(by_csi.size(), cfg.threads, [&](std::size_t g) {
    CsiFrequencyCache cache;
    const auto& c = *csi[g];
    for (std::size_t i : by_csi[g]) {
      const auto& e = entries[i];
      const auto& v = *video[video_index.at(e.video_path)];
      TrialScore t{e.trial_id, e.label, e.video_type, e.csi_type, {}, false};
      t.degenerate = e.label == TrialLabel::attack && e.video_type == e.csi_type;
      for (const auto& w : c.events) t.scores.push_back(score_event(v, c, w, inner, &cache).verdict.score);
      out[i] = std::move(t);
    }
  });
  return out;
}

std::vector<double> sequence_means(const std::vector<double>& pool, std::size_t n, std::size_t count,
                                   std::uint64_t seed) {
  if (n == 0) throw PreconditionError("sequence length must be >= 1");
  if (n == 1) return pool;
  if (pool.size() < n) return {};
  std::vector<std::size_t> index(pool.size());
  std::iota(index.begin(), index.end(), 0);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pick(n);
  std::vector<double> means;
  means.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::sample(index.begin(), index.end(), pick.begin(), n, rng);
    double sum = 0.0;
    for (std::size_t i : pick) sum += pool[i];
    means.push_back(sum / static_cast<double>(n));
  }
  return means;
}

EvalReport evaluate(std::vector<TrialScore> trials, const EvalOptions& opts, std::uint64_t seed) {
  validate(opts);
  EvalReport r;
  r.seed = seed;
  r.split_rule =
      "matched trials in manifest order: even positions (0, 2, ...) calibrate the threshold, odd positions are "
      "held out; trials without a detected CSI event are excluded; n = 1 uses every trial, n >= 2 draws " +
      std::to_string(opts.sequences) + " sequences of n distinct trials per label and half";

  std::vector<double> cal, hold, attack;
  std::size_t matched_pos = 0;
  for (const auto& t : trials) {
    if (t.label == TrialLabel::matched) {
      const bool calibration = matched_pos++ % 2 == 0;
      if (!t.has_events()) {
        ++r.legit_without_events;
        continue;
      }
      (calibration ? cal : hold).push_back(t.mean_score());
    } else {
      if (!t.has_events()) {
        ++r.attack_without_events;
        continue;
      }
      attack.push_back(t.mean_score());
    }
  }
  if (cal.empty() || hold.empty()) throw PreconditionError("corpus has too few legitimate trials with events");
  if (attack.empty()) throw PreconditionError("corpus has no attack trials with events");
  if (r.legit_without_events > 0) {
    r.warnings.push_back(std::to_string(r.legit_without_events) + " legitimate trials had no CSI event");
  }
  if (r.attack_without_events > 0) {
    r.warnings.push_back(std::to_string(r.attack_without_events) + " attack trials had no CSI event");
  }

  for (std::size_t n = 1; n <= opts.max_events; ++n) {
    SequenceSet s{n,
                  sequence_means(cal, n, opts.sequences, synth::derive_seed(seed, n, kCalibration)),
                  sequence_means(hold, n, opts.sequences, synth::derive_seed(seed, n, kHoldout)),
                  sequence_means(attack, n, opts.sequences, synth::derive_seed(seed, n, kAttack))};
    if (s.calibration.empty() || s.holdout.empty() || s.attack.empty()) {
      r.warnings.push_back("too few trials for " + std::to_string(n) + "-event sequences");
      r.sequences.push_back(std::move(s));
      continue;
    }
    for (double target : opts.target_fprs) {
      auto c = calibrate_decision_threshold(s.calibration, target);
      EvalCell cell{n, target, c.threshold, fraction_below(s.attack, c.threshold), c.empirical_fpr,
                    fraction_below(s.holdout, c.threshold), c.undersampled};
      if (c.undersampled) {
        r.warnings.push_back("n=" + std::to_string(n) + " target " + num(target) + ": only " +
                             std::to_string(s.calibration.size()) + " calibration sequences");
      }
      r.cells.push_back(cell);
    }
    r.sequences.push_back(std::move(s));
  }

  std::map<std::pair<std::string, int>, std::vector<double>> groups;
  for (const auto& t : trials) {
    auto& g = groups[{t.video_type, static_cast<int>(t.label)}];
    for (int s : t.scores) g.push_back(s);
  }
  for (const auto& [key, values] : groups) {
    auto [mean, sd] = mean_std(values);
    r.summaries.push_back({key.first, static_cast<TrialLabel>(key.second), values.size(), mean, sd});
  }
  r.trials = std::move(trials);
  return r;
}

nlohmann::json eval_report_json(const EvalReport& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"n", c.n},
                     {"target_fpr", c.target_fpr},
                     {"threshold", c.threshold},
                     {"tpr", c.tpr},
                     {"fpr_calibration", c.fpr_calibration},
                     {"fpr_holdout", c.fpr_holdout},
                     {"undersampled", c.undersampled}});
  }
  nlohmann::json seqs = nlohmann::json::array();
  for (const auto& s : r.sequences) {
    seqs.push_back({{"n", s.n},
                    {"calibration", s.calibration.size()},
                    {"holdout", s.holdout.size()},
                    {"attack", s.attack.size()}});
  }
  nlohmann::json summaries = nlohmann::json::array();
  for (const auto& s : r.summaries) {
    summaries.push_back({{"event_type", s.event_type},
                         {"label", synth::to_string(s.label)},
                         {"events", s.trials},
                         {"mean", s.mean},
                         {"std", s.stddev}});
  }
  std::size_t matched = 0, degenerate = 0;
  for (const auto& t : r.trials) {
    matched += t.label == TrialLabel::matched;
    degenerate += t.degenerate;
  }
  return {{"seed", r.seed},
          {"trials", {{"matched", matched}, {"attack", r.trials.size() - matched}, {"degenerate_attacks", degenerate}}},
          {"excluded_without_events", {{"matched", r.legit_without_events}, {"attack", r.attack_without_events}}},
          {"split_rule", r.split_rule},
          {"sequences", seqs},
          {"cells", cells},
          {"score_summaries", summaries},
          {"warnings", r.warnings}};
}

std::string tpr_csv(const EvalReport& r) {
  std::string out =
      "n,target_fpr,threshold,tpr,fpr_calibration,fpr_holdout,calibration_sequences,holdout_sequences,"
      "attack_sequences,undersampled\n";
  for (const auto& c : r.cells) {
    const auto& s = r.sequences[c.n - 1];
    out += std::to_string(c.n) + "," + num(c.target_fpr) + "," + num(c.threshold) + "," + num(c.tpr) + "," +
           num(c.fpr_calibration) + "," + num(c.fpr_holdout) + "," + std::to_string(s.calibration.size()) + "," +
           std::to_string(s.holdout.size()) + "," + std::to_string(s.attack.size()) + "," +
           (c.undersampled ? "1" : "0") + "\n";
  }
  return out;
}

std::string scores_csv(const EvalReport& r) {
  std::string out = "trial_id,label,video_type,csi_type,events,mean_score,scores\n";
  for (const auto& t : r.trials) {
    std::string scores;
    for (std::size_t i = 0; i < t.scores.size(); ++i) scores += (i ? ";" : "") + std::to_string(t.scores[i]);
    out += t.trial_id + "," + synth::to_string(t.label) + "," + t.video_type + "," + t.csi_type + "," +
           std::to_string(t.scores.size()) + "," + (t.has_events() ? num(t.mean_score()) : "") + "," + scores + "\n";
  }
  return out;
}

std::string cdf_csv(const EvalReport& r) {
  std::string out = "n,label,mean_score,cdf\n";
  for (const auto& s : r.sequences) {
    std::vector<double> legit = s.calibration;
    legit.insert(legit.end(), s.holdout.begin(), s.holdout.end());
    for (auto [label, values] : {std::pair{"legitimate", legit}, std::pair{"attack", s.attack}}) {
      std::sort(values.begin(), values.end());
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
        out += std::to_string(s.n) + "," + label + "," + num(values[i]) + "," +
               num(static_cast<double>(i + 1) / static_cast<double>(values.size())) + "\n";
      }
    }
  }
  return out;
}

std::vector<std::filesystem::path> write_eval_csvs(const EvalReport& report, const std::filesystem::path& out_csv) {
  auto sibling = [&](const std::string& suffix) {
    return out_csv.parent_path() / (out_csv.stem().string() + suffix + ".csv");
  };
  if (out_csv.has_parent_path()) std::filesystem::create_directories(out_csv.parent_path());
  std::vector<std::filesystem::path> paths{out_csv, sibling("_scores"), sibling("_cdf")};
  write_text(paths[0], tpr_csv(report));
  write_text(paths[1], scores_csv(report));
  write_text(paths[2], cdf_csv(report));
  return paths;
}

ThresholdTable calibrate_corpus(const std::vector<TrialScore>& trials, double target_fpr, const EvalOptions& opts,
                                std::uint64_t seed) {
  validate(opts);
  if (!(target_fpr > 0.0 && target_fpr < 1.0)) {
    throw PreconditionError("target FPR must lie in (0, 1); 0 is not achievable as an empirical quantile");
  }
  ThresholdTable table;
  table.target_fpr = target_fpr;
  std::vector<double> pool;
  for (const auto& t : trials) {
    if (t.label != TrialLabel::matched) continue;
    ++table.trials;
    if (t.has_events()) {
      pool.push_back(t.mean_score());
    } else {
      ++table.trials_without_events;
    }
  }
  if (pool.empty()) throw PreconditionError("corpus has no legitimate trials with detected events");
  if (table.trials_without_events > 0) {
    table.warnings.push_back(std::to_string(table.trials_without_events) + " legitimate trials had no CSI event");
  }
  for (std::size_t n = 1; n <= opts.max_events; ++n) {
    auto means = sequence_means(pool, n, opts.sequences, synth::derive_seed(seed, n, kAllLegit));
    if (means.empty()) {
      table.warnings.push_back("too few trials for " + std::to_string(n) + "-event sequences");
      continue;
    }
    auto c = calibrate_decision_threshold(means, target_fpr);
    if (c.undersampled) {
      table.warnings.push_back("n=" + std::to_string(n) + ": " + std::to_string(c.samples) +
                               " sequences are too few to resolve target FPR " + num(target_fpr));
    }
    table.per_n.emplace_back(n, c);
  }
  return table;
}

nlohmann::json threshold_table_json(const ThresholdTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [n, c] : t.per_n) {
    rows.push_back({{"n", n},
                    {"threshold", c.threshold},
                    {"empirical_fpr", c.empirical_fpr},
                    {"sequences", c.samples},
                    {"undersampled", c.undersampled}});
  }
  return {{"target_fpr", t.target_fpr},
          {"legitimate_trials", t.trials},
          {"excluded_without_events", t.trials_without_events},
          {"thresholds", rows},
          {"warnings", t.warnings}};
}

}  // namespace surfi
