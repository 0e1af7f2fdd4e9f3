#ifndef COPGUIDE_HARNESS_HPP
#define COPGUIDE_HARNESS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "copguide/metrics.hpp"
#include "copguide/refpath.hpp"
#include "copguide/simwalker.hpp"
#include "copguide/types.hpp"

namespace copguide {

// Reference source: a generated gait path or a path file.
struct PathSource {
  GaitParams generate;  // used when file is empty
  std::string file;
};

// Optional field-wise overrides applied on top of each condition's preset.
struct WalkerOverrides {
  std::optional<double> reaction_latency;
  std::optional<double> correction_speed;
  std::optional<double> drift_sigma;
  std::optional<double> bias_vx;
  std::optional<double> bias_vy;
  std::optional<double> visual_gain;
};

struct SessionPlan {
  std::vector<std::pair<Condition, int>> conditions;  // (condition, n_trials)
  FeedbackConfig config;
  PathSource path_source;
  WalkerOverrides walker;
  std::uint64_t base_seed = 42;
};

// The standard session: NF_O, NF_B, VF_O, EF_O, EF_B, three trials each.
SessionPlan default_session_plan();

// Plan file: `[section]` headers with `key = value` lines; sections
// `session`, `feedback`, `path`, `walker`. "default" loads the built-in
// plan. Unknown keys are rejected.
SessionPlan load_plan(const std::string& file_or_default);
SessionPlan parse_plan(const std::string& text);

// Deterministic per-trial seed: base ^ splitmix64(condition, trial).
std::uint64_t trial_seed(std::uint64_t base_seed, Condition c, int trial_index);
std::uint64_t splitmix64(std::uint64_t x);

struct TraceRow {
  double t = 0.0;
  double ax = 0.0, ay = 0.0;  // anticipatory error
  double rx = 0.0, ry = 0.0;  // real error
  bool valid = true;
};

struct TrialResult {
  TrialRecord record;
  std::vector<TraceRow> trace;
};

WalkerParams resolve_walker_params(const SessionPlan& plan, Condition c, int trial_index);

// Steps walker and engine over the shared tick grid for exactly the path
// duration. The engine runs only in belt conditions; the visual condition
// acts through the walker's visual gain.
TrialResult run_trial(const SessionPlan& plan, std::shared_ptr<const ReferencePath> path,
                      Condition condition, int trial_index);

struct RunArtifact {
  std::vector<TrialResult> trials;
  Summary summary;
};

std::shared_ptr<const ReferencePath> build_path(const SessionPlan& plan);
RunArtifact run_session(const SessionPlan& plan);

// Writes trials/trial-<COND>-<k>.csv (+ -commands.csv), summary.csv and
// summary.json under out_dir. Byte-reproducible for a fixed plan and seed.
void write_artifact(const RunArtifact& artifact, const SessionPlan& plan,
                    const std::string& out_dir);

// Reloads trial records from a run output directory (or its trials/ dir).
// th_out, when given, receives the threshold recorded with the trials.
std::vector<TrialRecord> read_records_dir(const std::string& dir, double* th_out = nullptr);

void write_trial_csv(const std::string& file, const TrialResult& trial, double th, double t_a);
TrialRecord read_trial_csv(const std::string& file, double* th_out = nullptr,
                           double* ta_out = nullptr);

// Runs the engine over a recorded fused-CoP stream against a reference
// path: the commands and indicators the belt would have produced.
// Timestamps are shifted so the recording starts at 0; the recording must
// cover the full path duration.
TrialResult replay(std::span<const CoPSample> fused, std::shared_ptr<const ReferencePath> path,
                   const FeedbackConfig& config);

}  // namespace copguide

#endif
