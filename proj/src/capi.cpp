#include "copguide/copguide.h"

#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "copguide/copstream.hpp"
#include "copguide/feedback.hpp"
#include "copguide/harness.hpp"
#include "copguide/metrics.hpp"
#include "copguide/refpath.hpp"
#include "copguide/server.hpp"
#include "copguide/types.hpp"
#include "json.hpp"

using namespace copguide;

struct cg_path {
  std::shared_ptr<const ReferencePath> path;
};

struct cg_engine {
  FeedbackEngine engine;
};

struct cg_server {
  LiveServer server;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
cg_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CG_OK;
  } catch (const InputError& e) {
    g_last_error = e.what();
    return CG_ERR_INPUT;
  } catch (const ProtocolError& e) {
    g_last_error = e.what();
    return CG_ERR_PROTOCOL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CG_ERR_INTERNAL;
  }
}

cg_status require(bool ok, const char* message) {
  if (ok) return CG_OK;
  g_last_error = message;
  return CG_ERR_INPUT;
}

FeedbackConfig to_config(const cg_feedback_config& c) {
  FeedbackConfig cfg;
  cfg.th_cop = c.th_cop;
  cfg.t_a = c.t_a;
  cfg.pulse_duration = c.pulse_duration;
  cfg.tick_rate = c.tick_rate;
  cfg.intensity = c.intensity;
  return cfg;
}

GaitParams to_gait(const cg_gait_params& g) {
  GaitParams params;
  params.step_length = g.step_length;
  params.step_period = g.step_period;
  params.ml_amplitude = g.ml_amplitude;
  params.path_length = g.path_length;
  params.double_support_fraction = g.double_support_fraction;
  return params;
}

cg_command to_c(const ActuatorCommand& cmd) {
  return cg_command{static_cast<int>(cmd.unit), cmd.intensity, cmd.duration_ms, cmd.seq};
}

ActuatorCommand from_c(const cg_command& cmd) {
  if (cmd.unit < 0 || cmd.unit > 3) throw InputError("bad unit code");
  ActuatorCommand out;
  out.unit = static_cast<Direction>(cmd.unit);
  out.intensity = cmd.intensity;
  out.duration_ms = cmd.duration_ms;
  out.seq = cmd.seq;
  return out;
}

void write_replay_json(const std::string& file, const TrialResult& result,
                       const FeedbackConfig& cfg, const IndicatorSet& ind) {
  nlohmann::ordered_json doc;
  doc["config"] = {{"th_cop", cfg.th_cop},
                   {"t_a", cfg.t_a},
                   {"pulse_duration", cfg.pulse_duration},
                   {"tick_rate", cfg.tick_rate},
                   {"intensity", cfg.intensity}};
  doc["n_samples"] = result.record.measured.size();
  doc["indicators"] = {{"rmse_x_cm", ind.rmse_x * 100.0},
                       {"rmse_y_cm", ind.rmse_y * 100.0},
                       {"tat_x_pct", ind.tat_x},
                       {"tat_y_pct", ind.tat_y}};
  doc["commands"] = nlohmann::ordered_json::array();
  for (const auto& tc : result.record.commands) {
    const auto frame = encode_command(tc.cmd);
    std::string hex;
    char buf[3];
    for (auto b : frame) {
      std::snprintf(buf, sizeof(buf), "%02X", b);
      hex += buf;
    }
    doc["commands"].push_back({{"t", tc.t},
                               {"unit", to_string(tc.cmd.unit)},
                               {"intensity", tc.cmd.intensity},
                               {"duration_ms", tc.cmd.duration_ms},
                               {"seq", tc.cmd.seq},
                               {"frame", hex}});
  }
  std::ofstream out(file);
  if (!out) throw InputError("cannot write '" + file + "'");
  out << doc.dump(2) << '\n';
}

}  // namespace

extern "C" {

const char* cg_version(void) { return "0.1.0"; }

const char* cg_last_error(void) { return g_last_error.c_str(); }

void cg_feedback_config_defaults(cg_feedback_config* out) {
  if (!out) return;
  const FeedbackConfig d;
  out->th_cop = d.th_cop;
  out->t_a = d.t_a;
  out->pulse_duration = d.pulse_duration;
  out->tick_rate = d.tick_rate;
  out->intensity = d.intensity;
}

void cg_gait_params_defaults(cg_gait_params* out) {
  if (!out) return;
  const GaitParams d;
  out->step_length = d.step_length;
  out->step_period = d.step_period;
  out->ml_amplitude = d.ml_amplitude;
  out->path_length = d.path_length;
  out->double_support_fraction = d.double_support_fraction;
}

cg_status cg_path_generate(const cg_gait_params* params, double rate, cg_path** out) {
  if (auto rc = require(params && out, "null argument")) return rc;
  return guarded([&] {
    *out = new cg_path{std::make_shared<ReferencePath>(generate_gait_path(to_gait(*params), rate))};
  });
}

cg_status cg_path_load(const char* file, cg_path** out) {
  if (auto rc = require(file && out, "null argument")) return rc;
  return guarded(
      [&] { *out = new cg_path{std::make_shared<ReferencePath>(load_path(file))}; });
}

cg_status cg_path_save(const cg_path* path, const char* file) {
  if (auto rc = require(path && file, "null argument")) return rc;
  return guarded([&] { save_path(*path->path, file); });
}

void cg_path_free(cg_path* path) { delete path; }

double cg_path_rate(const cg_path* path) { return path ? path->path->rate() : 0.0; }

size_t cg_path_size(const cg_path* path) { return path ? path->path->size() : 0; }

double cg_path_duration(const cg_path* path) { return path ? path->path->duration() : 0.0; }

cg_status cg_path_lookup(const cg_path* path, double t, double* x, double* y) {
  if (auto rc = require(path && x && y, "null argument")) return rc;
  return guarded([&] {
    const Vec2 p = path->path->lookup(t);
    *x = p.x;
    *y = p.y;
  });
}

cg_status cg_path_lookup_ahead(const cg_path* path, double t, double t_a, double* x, double* y) {
  if (auto rc = require(path && x && y, "null argument")) return rc;
  return guarded([&] {
    const Vec2 p = path->path->lookup_ahead(t, t_a);
    *x = p.x;
    *y = p.y;
  });
}

cg_status cg_engine_create(const cg_feedback_config* config, const cg_path* path,
                           cg_engine** out) {
  if (auto rc = require(config && path && out, "null argument")) return rc;
  return guarded([&] { *out = new cg_engine{FeedbackEngine(to_config(*config), path->path)}; });
}

void cg_engine_free(cg_engine* engine) { delete engine; }

cg_status cg_engine_tick(cg_engine* engine, double t, double x, double y, int valid,
                         cg_command out_cmds[2], int* n_out) {
  if (auto rc = require(engine && out_cmds && n_out, "null argument")) return rc;
  return guarded([&] {
    const auto cmds = engine->engine.tick(CoPSample{t, x, y, valid != 0});
    *n_out = static_cast<int>(cmds.size());
    for (std::size_t i = 0; i < cmds.size(); ++i) out_cmds[i] = to_c(cmds[i]);
  });
}

cg_status cg_encode_command(const cg_command* cmd, uint8_t frame_out[8]) {
  if (auto rc = require(cmd && frame_out, "null argument")) return rc;
  return guarded([&] {
    const auto frame = encode_command(from_c(*cmd));
    for (int i = 0; i < 8; ++i) frame_out[i] = frame[i];
  });
}

cg_status cg_decode_frame(const uint8_t frame[8], cg_command* out) {
  if (auto rc = require(frame && out, "null argument")) return rc;
  return guarded([&] {
    std::array<std::uint8_t, 8> f;
    for (int i = 0; i < 8; ++i) f[i] = frame[i];
    *out = to_c(decode_frame(f));
  });
}

cg_status cg_run_session(const char* plan, const uint64_t* seed_override, const char* out_dir) {
  if (auto rc = require(plan && out_dir, "null argument")) return rc;
  return guarded([&] {
    SessionPlan session_plan = load_plan(plan);
    if (seed_override) session_plan.base_seed = *seed_override;
    const RunArtifact artifact = run_session(session_plan);
    write_artifact(artifact, session_plan, out_dir);
  });
}

cg_status cg_replay(const char* fused_cop_csv, const char* path_file,
                    const cg_feedback_config* config, const char* out_json, cg_indicators* out) {
  if (auto rc = require(fused_cop_csv && path_file && config, "null argument")) return rc;
  return guarded([&] {
    const auto samples = read_cop_csv(fused_cop_csv);
    auto path = std::make_shared<const ReferencePath>(load_path(path_file));
    const FeedbackConfig cfg = to_config(*config);
    const TrialResult result = replay(samples, path, cfg);
    const IndicatorSet ind = indicators(result.record, cfg.th_cop);
    if (out_json) write_replay_json(out_json, result, cfg, ind);
    if (out) *out = cg_indicators{ind.rmse_x, ind.rmse_y, ind.tat_x, ind.tat_y};
  });
}

cg_status cg_fuse_plates_file(const char* plates_csv, const char* layout_csv, double rate,
                              double contact_threshold, double max_gap, const char* out_csv) {
  if (auto rc = require(plates_csv && layout_csv && out_csv, "null argument")) return rc;
  return guarded([&] {
    const PlateLayout layout = load_plate_layout(layout_csv);
    const auto frames = parse_plate_file(plates_csv, layout);
    const auto fused = fuse_recording(frames, contact_threshold);
    const auto resampled = resample_uniform(fused, rate, max_gap);
    write_cop_csv(out_csv, resampled);
  });
}

cg_status cg_metrics_report(const char* records_dir, const char* format, const char* out_file) {
  if (auto rc = require(records_dir && format, "null argument")) return rc;
  return guarded([&] {
    // The threshold rides along in each trial's metadata header; fall back
    // to the stock default for records that lack it.
    double th = FeedbackConfig{}.th_cop;
    const auto records = read_records_dir(records_dir, &th);
    const std::string fmt(format);
    const Summary summary = summarize(records, th);
    std::string text;
    if (fmt == "csv") {
      text = summary_csv(summary);
    } else if (fmt == "json") {
      text = summary_json(summary);
    } else {
      throw InputError("format must be csv or json");
    }
    if (out_file) {
      std::ofstream out(out_file);
      if (!out) throw InputError("cannot write '" + std::string(out_file) + "'");
      out << text;
    } else {
      std::fwrite(text.data(), 1, text.size(), stdout);
    }
  });
}

cg_status cg_server_create(const char* listen, const char* path_file,
                           const cg_feedback_config* config, cg_server** out) {
  if (auto rc = require(listen && path_file && config && out, "null argument")) return rc;
  return guarded([&] {
    auto path = std::make_shared<const ReferencePath>(load_path(path_file));
    *out = new cg_server{LiveServer(listen, path, to_config(*config))};
  });
}

int cg_server_port(const cg_server* server) { return server ? server->server.port() : -1; }

cg_status cg_server_run(cg_server* server) {
  if (auto rc = require(server != nullptr, "null argument")) return rc;
  return guarded([&] { server->server.run(); });
}

void cg_server_stop(cg_server* server) {
  if (server) server->server.stop();
}

void cg_server_free(cg_server* server) { delete server; }

}  // extern "C"
