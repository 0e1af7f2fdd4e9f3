/*
 * copguide C API — anticipatory vibrotactile CoP guidance.
 *
 * The library guides a walker's centre of pressure (CoP) along a reference
 * path: when the gap between the reference CoP half a second ahead and the
 * measured CoP exceeds a threshold, a directional vibration command is
 * issued on the corresponding trunk unit (repulsive convention: Back means
 * "move forward"). This header is the stable ABI; everything behind it is
 * C++.
 *
 * Conventions:
 *  - all functions returning cg_status report CG_OK (0) on success;
 *  - on failure, cg_last_error() returns a thread-local message;
 *  - objects behind opaque handles are freed with their cg_*_free function;
 *  - axes: +x anterior (walking direction), +y rightward, meters, seconds.
 */
#ifndef COPGUIDE_COPGUIDE_H
#define COPGUIDE_COPGUIDE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CG_API __declspec(dllexport)
#else
#define CG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cg_status {
  CG_OK = 0,
  CG_ERR_INPUT = 2,    /* missing file, schema violation, bad parameter */
  CG_ERR_PROTOCOL = 3, /* stream/transport violation */
  CG_ERR_INTERNAL = 4
} cg_status;

typedef enum cg_unit {
  CG_UNIT_FRONT = 0,
  CG_UNIT_BACK = 1,
  CG_UNIT_LEFT = 2,
  CG_UNIT_RIGHT = 3
} cg_unit;

typedef struct cg_feedback_config {
  double th_cop;         /* dead-zone half-width [m] */
  double t_a;            /* anticipation interval [s] */
  double pulse_duration; /* vibration pulse length [s] */
  double tick_rate;      /* engine tick rate [Hz] */
  uint8_t intensity;     /* 0..255 */
} cg_feedback_config;

typedef struct cg_gait_params {
  double step_length;             /* [m] */
  double step_period;             /* [s] */
  double ml_amplitude;            /* [m] */
  double path_length;             /* [m] */
  double double_support_fraction; /* [0,1) */
} cg_gait_params;

typedef struct cg_command {
  int unit; /* cg_unit */
  uint8_t intensity;
  uint32_t duration_ms;
  uint64_t seq; /* strictly increasing per engine; 8-bit on the wire */
} cg_command;

typedef struct cg_indicators {
  double rmse_x; /* [m] */
  double rmse_y;
  double tat_x; /* [%] */
  double tat_y;
} cg_indicators;

typedef struct cg_path cg_path;
typedef struct cg_engine cg_engine;
typedef struct cg_server cg_server;

CG_API const char* cg_version(void);

/* Message for the last failure on this thread; empty string if none. */
CG_API const char* cg_last_error(void);

CG_API void cg_feedback_config_defaults(cg_feedback_config* out);
CG_API void cg_gait_params_defaults(cg_gait_params* out);

/* -------- reference paths -------- */

CG_API cg_status cg_path_generate(const cg_gait_params* params, double rate, cg_path** out);
CG_API cg_status cg_path_load(const char* file, cg_path** out);
CG_API cg_status cg_path_save(const cg_path* path, const char* file);
CG_API void cg_path_free(cg_path* path);

CG_API double cg_path_rate(const cg_path* path);
CG_API size_t cg_path_size(const cg_path* path);
CG_API double cg_path_duration(const cg_path* path);

/* Clamped linear interpolation at t, and at t + t_a. */
CG_API cg_status cg_path_lookup(const cg_path* path, double t, double* x, double* y);
CG_API cg_status cg_path_lookup_ahead(const cg_path* path, double t, double t_a, double* x,
                                      double* y);

/* -------- feedback engine -------- */

/* Serial tick streaming: timestamps must be strictly increasing. Each tick
 * yields at most one command per axis (out_cmds must hold 2). */
CG_API cg_status cg_engine_create(const cg_feedback_config* config, const cg_path* path,
                                  cg_engine** out);
CG_API void cg_engine_free(cg_engine* engine);
CG_API cg_status cg_engine_tick(cg_engine* engine, double t, double x, double y, int valid,
                                cg_command out_cmds[2], int* n_out);

/* 8-byte command frame; see the wire layout in the project README. */
CG_API cg_status cg_encode_command(const cg_command* cmd, uint8_t frame_out[8]);
CG_API cg_status cg_decode_frame(const uint8_t frame[8], cg_command* out);

/* -------- batch runs -------- */

/* plan: a plan file path or "default". seed_override, when non-NULL,
 * replaces the plan's base seed. Writes trials/, summary.csv and
 * summary.json under out_dir; output is byte-reproducible. */
CG_API cg_status cg_run_session(const char* plan, const uint64_t* seed_override,
                                const char* out_dir);

/* Replays a fused-CoP CSV (t,x,y,valid) against a reference path, writing a
 * JSON report (commands + indicators) and optionally the indicators. */
CG_API cg_status cg_replay(const char* fused_cop_csv, const char* path_file,
                           const cg_feedback_config* config, const char* out_json,
                           cg_indicators* out);

/* Parses per-plate recordings, fuses them into one CoP stream and resamples
 * it to `rate`, writing a fused-CoP CSV. */
CG_API cg_status cg_fuse_plates_file(const char* plates_csv, const char* layout_csv, double rate,
                                     double contact_threshold, double max_gap,
                                     const char* out_csv);

/* Aggregates trial records from a run directory. format: "csv" or "json";
 * out_file NULL writes to stdout. */
CG_API cg_status cg_metrics_report(const char* records_dir, const char* format,
                                   const char* out_file);

/* -------- live streaming server -------- */

/* listen: "host:port" or ":port" (port 0 = ephemeral). Protocol: text lines
 * `t,x,y` in, 8-byte command frames out; `ERR parse <n>` on malformed
 * lines, three consecutive bad lines close the session. */
CG_API cg_status cg_server_create(const char* listen, const char* path_file,
                                  const cg_feedback_config* config, cg_server** out);
CG_API int cg_server_port(const cg_server* server);
CG_API cg_status cg_server_run(cg_server* server); /* blocks until stopped */
CG_API void cg_server_stop(cg_server* server);
CG_API void cg_server_free(cg_server* server);

#ifdef __cplusplus
}
#endif

#endif /* COPGUIDE_COPGUIDE_H */
