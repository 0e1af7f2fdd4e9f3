#include "copguide/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "copguide/copstream.hpp"
#include "copguide/feedback.hpp"
#include "text_util.hpp"

namespace copguide {

namespace fs = std::filesystem;
using detail::format_double;
using detail::parse_number;
using detail::split;
using detail::trim;

SessionPlan default_session_plan() {
  SessionPlan plan;
  for (Condition c : kAllConditions) plan.conditions.emplace_back(c, 3);
  return plan;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t base_seed, Condition c, int trial_index) {
  const auto tag = (static_cast<std::uint64_t>(static_cast<int>(c) + 1) << 32) |
                   static_cast<std::uint32_t>(trial_index);
  return base_seed ^ splitmix64(tag);
}

namespace {

std::vector<std::pair<Condition, int>> parse_condition_list(std::string_view value, int lineno) {
  std::vector<std::pair<Condition, int>> out;
  for (auto item : split(value, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw InputError("plan: expected CONDITION:N at line " + std::to_string(lineno));
    }
    Condition c = parse_condition(std::string(trim(item.substr(0, colon))));
    int n = parse_number<int>(item.substr(colon + 1), "plan", lineno);
    if (n < 1) throw InputError("plan: n_trials must be >= 1 at line " + std::to_string(lineno));
    out.emplace_back(c, n);
  }
  if (out.empty()) throw InputError("plan: empty condition list");
  return out;
}

}  // namespace

SessionPlan parse_plan(const std::string& text) {
  SessionPlan plan = default_session_plan();
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto row = trim(line);
    if (row.empty() || row.front() == '#') continue;
    if (row.front() == '[') {
      if (row.back() != ']') throw InputError("plan: bad section at line " + std::to_string(lineno));
      section = std::string(row.substr(1, row.size() - 2));
      if (section != "session" && section != "feedback" && section != "path" &&
          section != "walker") {
        throw InputError("plan: unknown section '" + section + "'");
      }
      continue;
    }
    auto eq = row.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("plan: expected key=value at line " + std::to_string(lineno));
    }
    const std::string key{trim(row.substr(0, eq))};
    const auto value = trim(row.substr(eq + 1));
    const auto num = [&] { return parse_number<double>(value, "plan", lineno); };

    if (section == "session") {
      if (key == "base_seed") {
        plan.base_seed = parse_number<std::uint64_t>(value, "plan", lineno);
      } else if (key == "conditions") {
        plan.conditions = parse_condition_list(value, lineno);
      } else {
        throw InputError("plan: unknown key '" + key + "' in [session]");
      }
    } else if (section == "feedback") {
      if (key == "th_cop") plan.config.th_cop = num();
      else if (key == "t_a") plan.config.t_a = num();
      else if (key == "pulse_duration") plan.config.pulse_duration = num();
      else if (key == "tick_rate") plan.config.tick_rate = num();
      else if (key == "intensity") {
        const int v = parse_number<int>(value, "plan", lineno);
        if (v < 0 || v > 255) throw InputError("plan: intensity out of range");
        plan.config.intensity = static_cast<std::uint8_t>(v);
      } else throw InputError("plan: unknown key '" + key + "' in [feedback]");
    } else if (section == "path") {
      if (key == "file") plan.path_source.file = std::string(value);
      else if (key == "step_length") plan.path_source.generate.step_length = num();
      else if (key == "step_period") plan.path_source.generate.step_period = num();
      else if (key == "ml_amplitude") plan.path_source.generate.ml_amplitude = num();
      else if (key == "path_length") plan.path_source.generate.path_length = num();
      else if (key == "double_support_fraction") {
        plan.path_source.generate.double_support_fraction = num();
      } else throw InputError("plan: unknown key '" + key + "' in [path]");
    } else if (section == "walker") {
      if (key == "reaction_latency") plan.walker.reaction_latency = num();
      else if (key == "correction_speed") plan.walker.correction_speed = num();
      else if (key == "drift_sigma") plan.walker.drift_sigma = num();
      else if (key == "bias_vx") plan.walker.bias_vx = num();
      else if (key == "bias_vy") plan.walker.bias_vy = num();
      else if (key == "visual_gain") plan.walker.visual_gain = num();
      else throw InputError("plan: unknown key '" + key + "' in [walker]");
    } else {
      throw InputError("plan: key outside any section at line " + std::to_string(lineno));
    }
  }
  plan.config.validate();
  return plan;
}

SessionPlan load_plan(const std::string& file_or_default) {
  if (file_or_default == "default") return default_session_plan();
  std::ifstream in(file_or_default);
  if (!in) throw InputError("cannot open plan '" + file_or_default + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_plan(buf.str());
}

WalkerParams resolve_walker_params(const SessionPlan& plan, Condition c, int trial_index) {
  WalkerParams p = condition_preset(c);
  const auto& o = plan.walker;
  if (o.reaction_latency) p.reaction_latency = *o.reaction_latency;
  if (o.correction_speed) p.correction_speed = *o.correction_speed;
  if (o.drift_sigma) p.drift_sigma = *o.drift_sigma;
  if (o.bias_vx) p.bias_vx = *o.bias_vx;
  if (o.bias_vy) p.bias_vy = *o.bias_vy;
  if (o.visual_gain) p.visual_gain = *o.visual_gain;
  p.rng_seed = trial_seed(plan.base_seed, c, trial_index);
  p.validate();
  return p;
}

std::shared_ptr<const ReferencePath> build_path(const SessionPlan& plan) {
  if (!plan.path_source.file.empty()) {
    return std::make_shared<ReferencePath>(load_path(plan.path_source.file));
  }
  return std::make_shared<ReferencePath>(
      generate_gait_path(plan.path_source.generate, plan.config.tick_rate));
}

namespace {

// Reference evaluated on the engine tick grid; identical to the path when
// the rates already match.
ReferencePath grid_reference(const ReferencePath& path, double tick_rate) {
  if (path.rate() == tick_rate) return path;
  const auto n = static_cast<std::size_t>(std::llround(path.duration() * tick_rate)) + 1;
  std::vector<Vec2> pts(std::max<std::size_t>(n, 2));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i] = path.lookup(static_cast<double>(i) / tick_rate);
  }
  return ReferencePath(tick_rate, std::move(pts));
}

}  // namespace

TrialResult run_trial(const SessionPlan& plan, std::shared_ptr<const ReferencePath> path,
                      Condition condition, int trial_index) {
  const FeedbackConfig& cfg = plan.config;
  const WalkerParams wp = resolve_walker_params(plan, condition, trial_index);
  const double dt = 1.0 / cfg.tick_rate;
  ReferencePath grid = grid_reference(*path, cfg.tick_rate);
  const std::size_t n = grid.size();

  Walker walker(wp, grid.points().front());
  std::optional<FeedbackEngine> engine;
  if (is_belt_condition(condition)) engine.emplace(cfg, path);
  CueInbox inbox;

  TrialResult result{
      TrialRecord{grid, {}, {}, condition, trial_index, wp.rng_seed, plan.base_seed}, {}};
  result.record.measured.reserve(n);
  result.trace.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / cfg.tick_rate;
    const auto cues = inbox.deliver(t);
    CoPSample sample;
    if (i == 0) {
      sample = CoPSample{t, walker.position().x, walker.position().y, true};
    } else {
      sample = walker.step(*path, t, dt, cues);
    }
    result.record.measured.push_back(sample);

    const Vec2 ea = anticipatory_error(*path, sample, cfg);
    const Vec2 er = real_error(*path, sample);
    result.trace.push_back(TraceRow{t, ea.x, ea.y, er.x, er.y, true});

    if (engine) {
      for (const auto& cmd : engine->tick(sample)) {
        result.record.commands.push_back(TimedCommand{t, cmd});
        inbox.push(cmd, t + wp.reaction_latency);
      }
    }
  }
  return result;
}

RunArtifact run_session(const SessionPlan& plan) {
  auto path = build_path(plan);
  RunArtifact artifact;
  for (const auto& [condition, n_trials] : plan.conditions) {
    for (int k = 0; k < n_trials; ++k) {
      artifact.trials.push_back(run_trial(plan, path, condition, k));
    }
  }
  std::vector<TrialRecord> records;
  records.reserve(artifact.trials.size());
  for (const auto& t : artifact.trials) records.push_back(t.record);
  artifact.summary = summarize(records, plan.config.th_cop);
  return artifact;
}

namespace {

std::string frame_hex(const ActuatorCommand& cmd) {
  const auto f = encode_command(cmd);
  std::string s;
  char buf[3];
  for (std::uint8_t b : f) {
    std::snprintf(buf, sizeof(buf), "%02X", b);
    s += buf;
  }
  return s;
}

void write_commands_csv(const std::string& file, std::span<const TimedCommand> commands) {
  std::ofstream out(file);
  if (!out) throw InputError("cannot write '" + file + "'");
  out << "t,unit,intensity,duration_ms,seq,frame_hex\n";
  for (const auto& tc : commands) {
    out << format_double(tc.t) << ',' << to_string(tc.cmd.unit) << ','
        << static_cast<int>(tc.cmd.intensity) << ',' << tc.cmd.duration_ms << ',' << tc.cmd.seq
        << ',' << frame_hex(tc.cmd) << '\n';
  }
}

std::string trial_stem(Condition c, int trial_index) {
  return "trial-" + to_string(c) + "-" + std::to_string(trial_index);
}

}  // namespace

void write_trial_csv(const std::string& file, const TrialResult& trial, double th, double t_a) {
  const TrialRecord& r = trial.record;
  std::ofstream out(file);
  if (!out) throw InputError("cannot write '" + file + "'");
  out << "# walker=" << r.walker_id << " condition=" << to_string(r.condition)
      << " trial=" << r.trial_index << " seed=" << r.seed
      << " rate=" << format_double(r.reference.rate()) << " th=" << format_double(th)
      << " ta=" << format_double(t_a) << '\n';
  out << "t,ref_x,ref_y,meas_x,meas_y,valid,err_ax,err_ay,err_rx,err_ry\n";
  for (std::size_t i = 0; i < r.measured.size(); ++i) {
    const auto& ref = r.reference.points()[i];
    const auto& m = r.measured[i];
    const auto& tr = trial.trace[i];
    out << format_double(m.t) << ',' << format_double(ref.x) << ',' << format_double(ref.y) << ','
        << format_double(m.x) << ',' << format_double(m.y) << ',' << (m.valid ? 1 : 0) << ','
        << format_double(tr.ax) << ',' << format_double(tr.ay) << ',' << format_double(tr.rx)
        << ',' << format_double(tr.ry) << '\n';
  }
  if (!out) throw InputError("write failed for '" + file + "'");
}

void write_artifact(const RunArtifact& artifact, const SessionPlan& plan,
                    const std::string& out_dir) {
  fs::create_directories(fs::path(out_dir) / "trials");
  for (const auto& trial : artifact.trials) {
    const auto stem = trial_stem(trial.record.condition, trial.record.trial_index);
    write_trial_csv((fs::path(out_dir) / "trials" / (stem + ".csv")).string(), trial,
                    plan.config.th_cop, plan.config.t_a);
    write_commands_csv((fs::path(out_dir) / "trials" / (stem + "-commands.csv")).string(),
                       trial.record.commands);
  }
  {
    std::ofstream out(fs::path(out_dir) / "summary.csv");
    if (!out) throw InputError("cannot write summary.csv under '" + out_dir + "'");
    out << summary_csv(artifact.summary);
  }
  {
    std::ofstream out(fs::path(out_dir) / "summary.json");
    if (!out) throw InputError("cannot write summary.json under '" + out_dir + "'");
    out << summary_json(artifact.summary);
  }
}

TrialRecord read_trial_csv(const std::string& file, double* th_out, double* ta_out) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open '" + file + "'");
  std::string line;
  if (!std::getline(in, line)) throw InputError("'" + file + "': empty file");
  auto meta = trim(line);
  if (meta.empty() || meta.front() != '#') {
    throw InputError("'" + file + "': missing metadata header");
  }

  TrialRecord record{ReferencePath(1.0, {Vec2{}, Vec2{}}), {}, {}, Condition::NF_O, 0, 0, 0};
  double rate = 0.0;
  for (auto field : split(meta.substr(1), ' ')) {
    field = trim(field);
    if (field.empty()) continue;
    auto eq = field.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = field.substr(0, eq);
    const auto value = std::string(field.substr(eq + 1));
    if (key == "walker") record.walker_id = std::stoull(value);
    else if (key == "condition") record.condition = parse_condition(value);
    else if (key == "trial") record.trial_index = std::stoi(value);
    else if (key == "seed") record.seed = std::stoull(value);
    else if (key == "rate") rate = std::stod(value);
    else if (key == "th" && th_out) *th_out = std::stod(value);
    else if (key == "ta" && ta_out) *ta_out = std::stod(value);
  }
  if (!(rate > 0.0)) throw InputError("'" + file + "': missing rate in metadata");

  if (!std::getline(in, line)) throw InputError("'" + file + "': missing column header");
  std::vector<Vec2> ref_pts;
  int lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    auto row = trim(line);
    if (row.empty()) continue;
    auto fields = split(row, ',');
    if (fields.size() != 10) {
      throw InputError("'" + file + "': expected 10 columns at line " + std::to_string(lineno));
    }
    CoPSample m;
    m.t = parse_number<double>(fields[0], "'" + file + "'", lineno);
    ref_pts.push_back({parse_number<double>(fields[1], "'" + file + "'", lineno),
                       parse_number<double>(fields[2], "'" + file + "'", lineno)});
    m.x = parse_number<double>(fields[3], "'" + file + "'", lineno);
    m.y = parse_number<double>(fields[4], "'" + file + "'", lineno);
    m.valid = parse_number<int>(fields[5], "'" + file + "'", lineno) != 0;
    record.measured.push_back(m);
  }
  if (ref_pts.size() < 2) throw InputError("'" + file + "': too few rows");
  record.reference = ReferencePath(rate, std::move(ref_pts));
  return record;
}

std::vector<TrialRecord> read_records_dir(const std::string& dir, double* th_out) {
  fs::path root(dir);
  if (fs::is_directory(root / "trials")) root /= "trials";
  if (!fs::is_directory(root)) throw InputError("'" + dir + "' is not a directory");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(root)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("trial-", 0) == 0 && name.size() > 4 &&
        name.find("-commands") == std::string::npos &&
        name.substr(name.size() - 4) == ".csv") {
      files.push_back(entry.path().string());
    }
  }
  if (files.empty()) throw InputError("no trial records under '" + dir + "'");
  std::sort(files.begin(), files.end());
  std::vector<TrialRecord> records;
  records.reserve(files.size());
  for (const auto& f : files) records.push_back(read_trial_csv(f, th_out));
  return records;
}

TrialResult replay(std::span<const CoPSample> fused, std::shared_ptr<const ReferencePath> path,
                   const FeedbackConfig& config) {
  config.validate();
  if (fused.size() < 2) throw InputError("replay: need at least 2 samples");

  // Align the recording's clock with the path's t=0.
  std::vector<CoPSample> shifted(fused.begin(), fused.end());
  const double t0 = shifted.front().t;
  for (auto& s : shifted) s.t -= t0;

  const double span = shifted.back().t;
  if (span + 1e-9 < path->duration()) {
    throw InputError("replay: recording (" + std::to_string(span) +
                     " s) is shorter than the reference path (" +
                     std::to_string(path->duration()) + " s)");
  }

  const auto resampled = resample_uniform(shifted, config.tick_rate);
  ReferencePath grid = grid_reference(*path, config.tick_rate);
  const std::size_t n = grid.size();

  FeedbackEngine engine(config, path);
  TrialResult result{TrialRecord{grid, {}, {}, Condition::EF_O, 0, 0, 0}, {}};
  for (std::size_t i = 0; i < n && i < resampled.size(); ++i) {
    const CoPSample& sample = resampled[i];
    result.record.measured.push_back(sample);
    if (sample.valid) {
      const Vec2 ea = anticipatory_error(*path, sample, config);
      const Vec2 er = real_error(*path, sample);
      result.trace.push_back(TraceRow{sample.t, ea.x, ea.y, er.x, er.y, true});
    } else {
      result.trace.push_back(TraceRow{sample.t, 0.0, 0.0, 0.0, 0.0, false});
    }
    for (const auto& cmd : engine.tick(sample)) {
      result.record.commands.push_back(TimedCommand{sample.t, cmd});
    }
  }
  if (result.record.measured.size() != n) {
    throw InputError("replay: resampled recording does not cover the path grid");
  }
  return result;
}

}  // namespace copguide
