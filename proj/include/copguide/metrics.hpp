#ifndef COPGUIDE_METRICS_HPP
#define COPGUIDE_METRICS_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "copguide/refpath.hpp"
#include "copguide/types.hpp"

namespace copguide {

struct TimedCommand {
  double t = 0.0;  // engine tick that emitted the command
  ActuatorCommand cmd;
};

// One trial: reference and measured CoP on the same uniform grid, plus the
// commands the engine emitted.
struct TrialRecord {
  ReferencePath reference;
  std::vector<CoPSample> measured;  // same length/grid as reference
  std::vector<TimedCommand> commands;
  Condition condition = Condition::NF_O;
  int trial_index = 0;
  std::uint64_t seed = 0;       // per-trial rng seed
  std::uint64_t walker_id = 0;  // session/walker identity (base seed)
};

struct IndicatorSet {
  double rmse_x = 0.0;  // [m]
  double rmse_y = 0.0;
  double tat_x = 0.0;  // [%]
  double tat_y = 0.0;
};

// Root mean square of the same-instant error over the trial. Invalid
// measured samples are excluded and N reduced (with a warning on stderr);
// the trial must keep at least one valid sample.
double rmse(const TrialRecord& record, Axis axis);

// Percentage of samples whose |same-instant error| strictly exceeds th.
// Invalid measured samples count as above threshold.
double tat(const TrialRecord& record, Axis axis, double th);

IndicatorSet indicators(const TrialRecord& record, double th);

// Arithmetic mean of the indicators across same-condition trials.
IndicatorSet trial_average(std::span<const TrialRecord> records, double th);

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

struct ConditionStats {
  Quartiles rmse_x_cm, rmse_y_cm;  // [cm]
  Quartiles tat_x_pct, tat_y_pct;  // [%]
  int n = 0;                       // walkers contributing
};

struct SummaryRow {
  std::uint64_t walker = 0;
  Condition condition = Condition::NF_O;
  IndicatorSet avg;  // trial-averaged, meters / percent
};

struct Summary {
  std::vector<SummaryRow> rows;               // sorted by (walker, condition)
  std::map<Condition, ConditionStats> stats;  // across walkers
};

// Groups records by (walker, condition), averages each group's trials and
// attaches per-condition quartiles across walkers.
Summary summarize(std::span<const TrialRecord> records, double th);

// `walker,condition,rmse_x_cm,rmse_y_cm,tat_x_pct,tat_y_pct`, one decimal.
std::string summary_csv(const Summary& summary);

// Full-precision rows plus per-condition quartiles.
std::string summary_json(const Summary& summary);

// Sample quantile with linear interpolation between closest ranks.
double quantile(std::vector<double> values, double p);
double median(std::vector<double> values);

}  // namespace copguide

#endif
