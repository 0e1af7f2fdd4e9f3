#include "copguide/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace copguide {

namespace {

double axis_ref(const Vec2& p, Axis a) { return a == Axis::AP ? p.x : p.y; }
double axis_meas(const CoPSample& s, Axis a) { return a == Axis::AP ? s.x : s.y; }

void check_record(const TrialRecord& r) {
  if (r.measured.empty()) throw InputError("metrics: empty record");
  if (r.measured.size() != r.reference.size()) {
    throw InputError("metrics: measured/reference length mismatch");
  }
}

std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

int condition_rank(Condition c) {
  int i = 0;
  for (Condition k : kAllConditions) {
    if (k == c) return i;
    ++i;
  }
  return i;
}

}  // namespace

double rmse(const TrialRecord& record, Axis axis) {
  check_record(record);
  double sum_sq = 0.0;
  std::size_t n_valid = 0;
  for (std::size_t i = 0; i < record.measured.size(); ++i) {
    if (!record.measured[i].valid) continue;
    const double d = axis_ref(record.reference.points()[i], axis) -
                     axis_meas(record.measured[i], axis);
    sum_sq += d * d;
    ++n_valid;
  }
  if (n_valid == 0) throw InputError("metrics: no valid samples in record");
  if (n_valid < record.measured.size()) {
    std::cerr << "warning: rmse over " << to_string(record.condition) << " trial "
              << record.trial_index << " excluded "
              << record.measured.size() - n_valid << " invalid samples\n";
  }
  return std::sqrt(sum_sq / static_cast<double>(n_valid));
}

double tat(const TrialRecord& record, Axis axis, double th) {
  check_record(record);
  if (!(th > 0.0)) throw InputError("metrics: threshold must be positive");
  std::size_t above = 0;
  for (std::size_t i = 0; i < record.measured.size(); ++i) {
    if (!record.measured[i].valid) {
      ++above;  // no contact counts as off the reference
      continue;
    }
    const double d = axis_ref(record.reference.points()[i], axis) -
                     axis_meas(record.measured[i], axis);
    if (std::abs(d) > th) ++above;
  }
  return 100.0 * static_cast<double>(above) / static_cast<double>(record.measured.size());
}

IndicatorSet indicators(const TrialRecord& record, double th) {
  IndicatorSet s;
  s.rmse_x = rmse(record, Axis::AP);
  s.rmse_y = rmse(record, Axis::ML);
  s.tat_x = tat(record, Axis::AP, th);
  s.tat_y = tat(record, Axis::ML, th);
  return s;
}

IndicatorSet trial_average(std::span<const TrialRecord> records, double th) {
  if (records.empty()) throw InputError("trial_average: no records");
  const Condition c = records.front().condition;
  IndicatorSet acc;
  for (const auto& r : records) {
    if (r.condition != c) throw InputError("trial_average: mixed conditions");
    const IndicatorSet s = indicators(r, th);
    acc.rmse_x += s.rmse_x;
    acc.rmse_y += s.rmse_y;
    acc.tat_x += s.tat_x;
    acc.tat_y += s.tat_y;
  }
  const auto n = static_cast<double>(records.size());
  return {acc.rmse_x / n, acc.rmse_y / n, acc.tat_x / n, acc.tat_y / n};
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InputError("quantile: no values");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("quantile: p out of range");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

Summary summarize(std::span<const TrialRecord> records, double th) {
  Summary summary;
  std::map<std::pair<std::uint64_t, int>, std::vector<TrialRecord>> groups;
  for (const auto& r : records) {
    groups[{r.walker_id, condition_rank(r.condition)}].push_back(r);
  }
  for (const auto& [key, group] : groups) {
    SummaryRow row;
    row.walker = key.first;
    row.condition = group.front().condition;
    row.avg = trial_average(group, th);
    summary.rows.push_back(row);
  }
  for (Condition c : kAllConditions) {
    std::vector<double> rx, ry, tx, ty;
    for (const auto& row : summary.rows) {
      if (row.condition != c) continue;
      rx.push_back(row.avg.rmse_x * 100.0);
      ry.push_back(row.avg.rmse_y * 100.0);
      tx.push_back(row.avg.tat_x);
      ty.push_back(row.avg.tat_y);
    }
    if (rx.empty()) continue;
    ConditionStats stats;
    stats.n = static_cast<int>(rx.size());
    stats.rmse_x_cm = {quantile(rx, 0.25), quantile(rx, 0.5), quantile(rx, 0.75)};
    stats.rmse_y_cm = {quantile(ry, 0.25), quantile(ry, 0.5), quantile(ry, 0.75)};
    stats.tat_x_pct = {quantile(tx, 0.25), quantile(tx, 0.5), quantile(tx, 0.75)};
    stats.tat_y_pct = {quantile(ty, 0.25), quantile(ty, 0.5), quantile(ty, 0.75)};
    summary.stats[c] = stats;
  }
  return summary;
}

std::string summary_csv(const Summary& summary) {
  std::ostringstream out;
  out << "walker,condition,rmse_x_cm,rmse_y_cm,tat_x_pct,tat_y_pct\n";
  for (const auto& row : summary.rows) {
    out << row.walker << ',' << to_string(row.condition) << ',' << fixed1(row.avg.rmse_x * 100.0)
        << ',' << fixed1(row.avg.rmse_y * 100.0) << ',' << fixed1(row.avg.tat_x) << ','
        << fixed1(row.avg.tat_y) << '\n';
  }
  return out.str();
}

std::string summary_json(const Summary& summary) {
  nlohmann::ordered_json doc;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : summary.rows) {
    doc["rows"].push_back({{"walker", row.walker},
                           {"condition", to_string(row.condition)},
                           {"rmse_x_cm", row.avg.rmse_x * 100.0},
                           {"rmse_y_cm", row.avg.rmse_y * 100.0},
                           {"tat_x_pct", row.avg.tat_x},
                           {"tat_y_pct", row.avg.tat_y}});
  }
  auto quart = [](const Quartiles& q) {
    return nlohmann::ordered_json{{"q1", q.q1}, {"median", q.median}, {"q3", q.q3}};
  };
  doc["conditions"] = nlohmann::ordered_json::object();
  for (const auto& [c, stats] : summary.stats) {
    doc["conditions"][to_string(c)] = {{"n", stats.n},
                                       {"rmse_x_cm", quart(stats.rmse_x_cm)},
                                       {"rmse_y_cm", quart(stats.rmse_y_cm)},
                                       {"tat_x_pct", quart(stats.tat_x_pct)},
                                       {"tat_y_pct", quart(stats.tat_y_pct)}};
  }
  return doc.dump(2) + "\n";
}

}  // namespace copguide
