#ifndef COPGUIDE_SIMWALKER_HPP
#define COPGUIDE_SIMWALKER_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "copguide/refpath.hpp"
#include "copguide/types.hpp"

namespace copguide {

// Parametric stand-in for a human subject.
struct WalkerParams {
  double reaction_latency = 0.25;   // cue-to-movement delay [s]
  double correction_speed = 0.18;   // corrective speed during a cue/visual pull [m/s]
  double drift_sigma = 0.05;        // random-walk intensity [m/sqrt(s)]
  double bias_vx = 0.0;             // veer velocity [m/s]
  double bias_vy = 0.0;
  double visual_gain = 0.0;         // 0 = no visual correction, 1 = full
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Condition presets. Blindfolded conditions double the drift and add a veer
// bias; the visual condition adds continuous correction toward the
// reference; belt conditions keep the matching no-feedback noise profile and
// react to delivered cues instead.
WalkerParams condition_preset(Condition c);

// Flat key=value file with keys matching the WalkerParams fields:
// reaction_latency, correction_speed, drift_sigma, bias_vx, bias_vy,
// visual_gain, rng_seed.
WalkerParams load_walker_params(const std::string& path);
void save_walker_params(const WalkerParams& params, const std::string& path);

// Queue modelling reaction delay: commands become due reaction_latency
// seconds after the engine emitted them. FIFO; delivered entries are
// removed.
class CueInbox {
 public:
  struct Entry {
    ActuatorCommand cmd;
    double deliver_at;
  };

  void push(const ActuatorCommand& cmd, double deliver_at);
  std::vector<Entry> deliver(double t);  // everything due at or before t
  bool empty() const { return queue_.empty(); }
  std::size_t size() const { return queue_.size(); }

 private:
  std::deque<Entry> queue_;
};

// Discrete-time walker. Each step advances one tick:
//   pos += nominal progression (the reference increment over dt)
//        + Gaussian drift (std drift_sigma*sqrt(dt), x drawn before y)
//        + bias_velocity*dt
//        + visual pull visual_gain*(ref(t)-pos) clipped to correction_speed*dt
//        + cue pull correction_speed*dt in the repulsive direction
//          (Back=>+x, Front=>-x, Left=>+y, Right=>-y), active for the cue's
//          pulse duration after its delivery instant.
// Deterministic under a fixed rng_seed.
class Walker {
 public:
  Walker(const WalkerParams& params, Vec2 start);

  CoPSample step(const ReferencePath& path, double t, double dt,
                 std::span<const CueInbox::Entry> cues);

  const Vec2& position() const { return pos_; }
  const WalkerParams& params() const { return params_; }

 private:
  struct CueEffect {
    double sign;
    double start;  // delivery instant; effect applies to ticks in (start, until]
    double until;
  };

  double cue_pull(const std::optional<CueEffect>& effect, double t, double dt) const;

  WalkerParams params_;
  Vec2 pos_;
  std::optional<CueEffect> ap_cue_;
  std::optional<CueEffect> ml_cue_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_;
};

}  // namespace copguide

#endif
