// copguide command line front end. Talks to the library exclusively through
// the C API so it doubles as a reference client for external integrations.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "copguide/copguide.h"

namespace {

int fail(cg_status rc) {
  std::fprintf(stderr, "error: %s\n", cg_last_error());
  return static_cast<int>(rc);
}

struct ConfigFlags {
  cg_feedback_config cfg;
  void attach(CLI::App* cmd, bool with_rate = true) {
    cg_feedback_config_defaults(&cfg);
    cmd->add_option("--th", cfg.th_cop, "CoP threshold [m]")->capture_default_str();
    cmd->add_option("--ta", cfg.t_a, "anticipation interval [s]")->capture_default_str();
    cmd->add_option("--pulse", cfg.pulse_duration, "pulse duration [s]")->capture_default_str();
    if (with_rate) {
      cmd->add_option("--rate", cfg.tick_rate, "tick rate [Hz]")->capture_default_str();
    }
    cmd->add_option("--intensity", cfg.intensity, "vibration intensity 0-255")
        ->capture_default_str();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anticipatory vibrotactile CoP guidance toolkit"};
  app.require_subcommand(1);

  // generate-path
  auto* gen = app.add_subcommand("generate-path", "synthesize a slow-walk reference CoP path");
  cg_gait_params gait;
  cg_gait_params_defaults(&gait);
  double gen_rate = 100.0;
  std::string gen_out;
  gen->add_option("--step-length", gait.step_length, "step length [m]")->capture_default_str();
  gen->add_option("--step-period", gait.step_period, "step period [s]")->capture_default_str();
  gen->add_option("--ml-amplitude", gait.ml_amplitude, "lateral sway amplitude [m]")
      ->capture_default_str();
  gen->add_option("--length", gait.path_length, "total path length [m]")->capture_default_str();
  gen->add_option("--double-support", gait.double_support_fraction,
                  "double-support fraction of each step")
      ->capture_default_str();
  gen->add_option("--rate", gen_rate, "sampling rate [Hz]")->capture_default_str();
  gen->add_option("--out", gen_out, "output path file")->required();

  // run
  auto* run = app.add_subcommand("run", "run a seeded simulated session");
  std::string run_plan = "default";
  std::uint64_t run_seed = 0;
  std::string run_out_dir;
  run->add_option("--plan", run_plan, "plan file or 'default'")->capture_default_str();
  auto* seed_opt = run->add_option("--seed", run_seed, "base seed (overrides the plan)");
  run->add_option("--out-dir", run_out_dir, "output directory")->required();

  // replay
  auto* rep = app.add_subcommand("replay", "run the engine over a recorded fused-CoP stream");
  std::string rep_cop, rep_path, rep_out;
  ConfigFlags rep_cfg;
  rep->add_option("--cop", rep_cop, "fused-CoP CSV (t,x,y,valid)")->required();
  rep->add_option("--path", rep_path, "reference path file")->required();
  rep_cfg.attach(rep);
  rep->add_option("--out", rep_out, "output JSON report")->required();

  // metrics
  auto* met = app.add_subcommand("metrics", "aggregate indicators from trial records");
  std::string met_records, met_format = "csv";
  met->add_option("--records", met_records, "run output directory")->required();
  met->add_option("--format", met_format, "csv or json")->capture_default_str();

  // serve
  auto* srv = app.add_subcommand("serve", "stream samples in, command frames out over TCP");
  std::string srv_listen, srv_path;
  ConfigFlags srv_cfg;
  srv->add_option("--listen", srv_listen, "listen address host:port")->required();
  srv->add_option("--path", srv_path, "reference path file")->required();
  srv_cfg.attach(srv, /*with_rate=*/false);

  // fuse
  auto* fuse = app.add_subcommand("fuse", "fuse per-plate recordings into one CoP stream");
  std::string fuse_plates, fuse_layout, fuse_out;
  double fuse_rate = 100.0, fuse_threshold = 20.0, fuse_max_gap = 0.2;
  fuse->add_option("--plates", fuse_plates, "plate CSV (t,plate_id,fz,cop_x,cop_y)")->required();
  fuse->add_option("--layout", fuse_layout, "layout CSV (plate_id,origin_x,origin_y)")
      ->required();
  fuse->add_option("--rate", fuse_rate, "output rate [Hz]")->capture_default_str();
  fuse->add_option("--threshold", fuse_threshold, "contact threshold [N]")
      ->capture_default_str();
  fuse->add_option("--max-gap", fuse_max_gap, "longest bridgeable invalid gap [s]")
      ->capture_default_str();
  fuse->add_option("--out", fuse_out, "output fused-CoP CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(CG_ERR_INPUT);
  }

  if (gen->parsed()) {
    cg_path* path = nullptr;
    if (auto rc = cg_path_generate(&gait, gen_rate, &path)) return fail(rc);
    const cg_status rc = cg_path_save(path, gen_out.c_str());
    if (rc == CG_OK) {
      std::printf("wrote %s (%zu points, %.2f s at %.0f Hz)\n", gen_out.c_str(),
                  cg_path_size(path), cg_path_duration(path), cg_path_rate(path));
    }
    cg_path_free(path);
    return rc == CG_OK ? 0 : fail(rc);
  }

  if (run->parsed()) {
    const std::uint64_t* seed = seed_opt->count() > 0 ? &run_seed : nullptr;
    if (auto rc = cg_run_session(run_plan.c_str(), seed, run_out_dir.c_str())) return fail(rc);
    std::printf("session written to %s\n", run_out_dir.c_str());
    return 0;
  }

  if (rep->parsed()) {
    cg_indicators ind{};
    if (auto rc = cg_replay(rep_cop.c_str(), rep_path.c_str(), &rep_cfg.cfg, rep_out.c_str(),
                            &ind)) {
      return fail(rc);
    }
    std::printf("rmse_x_cm=%.1f rmse_y_cm=%.1f tat_x_pct=%.1f tat_y_pct=%.1f\n",
                ind.rmse_x * 100.0, ind.rmse_y * 100.0, ind.tat_x, ind.tat_y);
    return 0;
  }

  if (met->parsed()) {
    if (auto rc = cg_metrics_report(met_records.c_str(), met_format.c_str(), nullptr)) {
      return fail(rc);
    }
    return 0;
  }

  if (srv->parsed()) {
    cg_server* server = nullptr;
    if (auto rc = cg_server_create(srv_listen.c_str(), srv_path.c_str(), &srv_cfg.cfg, &server)) {
      return fail(rc);
    }
    std::printf("listening on port %d\n", cg_server_port(server));
    std::fflush(stdout);
    const cg_status rc = cg_server_run(server);
    cg_server_free(server);
    return rc == CG_OK ? 0 : fail(rc);
  }

  if (fuse->parsed()) {
    if (auto rc = cg_fuse_plates_file(fuse_plates.c_str(), fuse_layout.c_str(), fuse_rate,
                                      fuse_threshold, fuse_max_gap, fuse_out.c_str())) {
      return fail(rc);
    }
    std::printf("wrote %s\n", fuse_out.c_str());
    return 0;
  }

  return static_cast<int>(CG_ERR_INPUT);
}
