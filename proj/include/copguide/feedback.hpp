#ifndef COPGUIDE_FEEDBACK_HPP
#define COPGUIDE_FEEDBACK_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "copguide/refpath.hpp"
#include "copguide/types.hpp"

namespace copguide {

// Signed anticipatory error: reference at t + t_a minus measured at t.
// Positive x means the reference is ahead of the walker.
Vec2 anticipatory_error(const ReferencePath& path, const CoPSample& measured,
                        const FeedbackConfig& config);

// Signed same-instant error: reference at t minus measured at t.
Vec2 real_error(const ReferencePath& path, const CoPSample& measured);

// At most one unit per axis; empty inside the dead zone.
struct Decision {
  std::optional<Direction> ap;
  std::optional<Direction> ml;

  bool empty() const { return !ap && !ml; }
};

// Dead-band direction logic with the repulsive convention: the reference
// lying beyond +th ahead triggers Back ("move forward"), beyond -th behind
// triggers Front; +th right triggers Left, -th left triggers Right.
// Comparisons are strict; |error| == th stays silent.
Decision decide(double dx_a, double dy_a, const FeedbackConfig& config);

struct ActivePulse {
  Direction unit;
  double expiry;  // [s]
};

struct EngineState {
  std::optional<ActivePulse> ap;
  std::optional<ActivePulse> ml;
  double last_tick;
  std::uint64_t next_seq = 0;

  EngineState();
};

// Per-tick anticipatory feedback engine. Serial use only: samples must be
// fed in strictly increasing timestamp order. Each tick emits at most one
// command per axis; an axis with an unexpired pulse stays silent even if
// the decision flips, so per-axis commands are spaced >= pulse_duration.
// Invalid samples advance the clock and emit nothing.
class FeedbackEngine {
 public:
  FeedbackEngine(FeedbackConfig config, std::shared_ptr<const ReferencePath> path);

  // AP command first when both axes fire on the same tick.
  std::vector<ActuatorCommand> tick(const CoPSample& measured);

  const EngineState& state() const { return state_; }
  const FeedbackConfig& config() const { return config_; }
  const ReferencePath& path() const { return *path_; }

 private:
  std::optional<ActuatorCommand> fire(std::optional<ActivePulse>& pulse, Direction unit,
                                      double t);

  FeedbackConfig config_;
  std::shared_ptr<const ReferencePath> path_;
  EngineState state_;
};

// Command frame, 8 bytes, big-endian multi-byte fields:
//   byte0 sync 0xA5; byte1 unit (0=Front,1=Back,2=Left,3=Right);
//   byte2 reserved 0x01; byte3 intensity; bytes4-5 duration_ms;
//   byte6 seq mod 256; byte7 XOR checksum of bytes 0-6.
std::array<std::uint8_t, 8> encode_command(const ActuatorCommand& cmd);

// Validates sync, reserved byte, unit code and checksum. The decoded seq is
// the 8-bit wire value, i.e. the original seq mod 256.
ActuatorCommand decode_frame(const std::array<std::uint8_t, 8>& frame);

}  // namespace copguide

#endif
