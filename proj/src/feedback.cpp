#include "copguide/feedback.hpp"

#include <cmath>
#include <limits>

namespace copguide {

namespace {
// Tolerance on pulse expiry so re-triggering at exact multiples of the
// pulse duration survives t = i/rate rounding.
constexpr double kExpirySlack = 1e-9;
}  // namespace

EngineState::EngineState() : last_tick(-std::numeric_limits<double>::infinity()) {}

Vec2 anticipatory_error(const ReferencePath& path, const CoPSample& measured,
                        const FeedbackConfig& config) {
  if (!measured.valid) throw InputError("anticipatory_error: invalid sample");
  const Vec2 ref = path.lookup_ahead(measured.t, config.t_a);
  return {ref.x - measured.x, ref.y - measured.y};
}

Vec2 real_error(const ReferencePath& path, const CoPSample& measured) {
  if (!measured.valid) throw InputError("real_error: invalid sample");
  const Vec2 ref = path.lookup(measured.t);
  return {ref.x - measured.x, ref.y - measured.y};
}

Decision decide(double dx_a, double dy_a, const FeedbackConfig& config) {
  Decision d;
  if (dx_a > config.th_cop) {
    d.ap = Direction::Back;
  } else if (dx_a < -config.th_cop) {
    d.ap = Direction::Front;
  }
  if (dy_a > config.th_cop) {
    d.ml = Direction::Left;
  } else if (dy_a < -config.th_cop) {
    d.ml = Direction::Right;
  }
  return d;
}

FeedbackEngine::FeedbackEngine(FeedbackConfig config, std::shared_ptr<const ReferencePath> path)
    : config_(config), path_(std::move(path)) {
  config_.validate();
  if (!path_) throw InputError("engine needs a reference path");
}

std::optional<ActuatorCommand> FeedbackEngine::fire(std::optional<ActivePulse>& pulse,
                                                    Direction unit, double t) {
  if (pulse && t < pulse->expiry - kExpirySlack) return std::nullopt;
  ActuatorCommand cmd;
  cmd.unit = unit;
  cmd.intensity = config_.intensity;
  cmd.duration_ms = static_cast<std::uint32_t>(std::llround(config_.pulse_duration * 1000.0));
  cmd.seq = state_.next_seq++;
  pulse = ActivePulse{unit, t + config_.pulse_duration};
  return cmd;
}

std::vector<ActuatorCommand> FeedbackEngine::tick(const CoPSample& measured) {
  if (!(measured.t > state_.last_tick)) {
    throw InputError("engine tick: non-monotonic sample timestamp");
  }
  state_.last_tick = measured.t;
  if (!measured.valid) return {};

  const Vec2 err = anticipatory_error(*path_, measured, config_);
  const Decision d = decide(err.x, err.y, config_);
  std::vector<ActuatorCommand> out;
  if (d.ap) {
    if (auto cmd = fire(state_.ap, *d.ap, measured.t)) out.push_back(*cmd);
  }
  if (d.ml) {
    if (auto cmd = fire(state_.ml, *d.ml, measured.t)) out.push_back(*cmd);
  }
  return out;
}

std::array<std::uint8_t, 8> encode_command(const ActuatorCommand& cmd) {
  if (cmd.duration_ms > 65535) throw InputError("duration_ms exceeds the 16-bit frame field");
  if (cmd.duration_ms == 0) throw InputError("duration_ms must be positive");
  std::array<std::uint8_t, 8> f{};
  f[0] = 0xA5;
  f[1] = static_cast<std::uint8_t>(cmd.unit);
  f[2] = 0x01;
  f[3] = cmd.intensity;
  f[4] = static_cast<std::uint8_t>(cmd.duration_ms >> 8);
  f[5] = static_cast<std::uint8_t>(cmd.duration_ms & 0xFF);
  f[6] = static_cast<std::uint8_t>(cmd.seq & 0xFF);
  std::uint8_t checksum = 0;
  for (int i = 0; i < 7; ++i) checksum ^= f[i];
  f[7] = checksum;
  return f;
}

ActuatorCommand decode_frame(const std::array<std::uint8_t, 8>& frame) {
  if (frame[0] != 0xA5) throw ProtocolError("frame: bad sync byte");
  if (frame[2] != 0x01) throw ProtocolError("frame: bad reserved byte");
  if (frame[1] > 3) throw ProtocolError("frame: bad unit code");
  std::uint8_t checksum = 0;
  for (int i = 0; i < 7; ++i) checksum ^= frame[i];
  if (checksum != frame[7]) throw ProtocolError("frame: checksum mismatch");
  ActuatorCommand cmd;
  cmd.unit = static_cast<Direction>(frame[1]);
  cmd.intensity = frame[3];
  cmd.duration_ms = (static_cast<std::uint32_t>(frame[4]) << 8) | frame[5];
  cmd.seq = frame[6];
  return cmd;
}

}  // namespace copguide
