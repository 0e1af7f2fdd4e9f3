#ifndef COPGUIDE_TYPES_HPP
#define COPGUIDE_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace copguide {

// Bad user input: missing files, schema violations, out-of-range parameters,
// malformed sample streams. Maps to exit code 2 in the CLI.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wire/transport-level violations in the live streaming mode. Exit code 3.
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Timestamped planar CoP point. Axes: +x anterior (walking direction),
// +y rightward. `valid` is false while total vertical force is below the
// contact threshold; x,y then hold the last valid position.
struct CoPSample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  bool valid = true;
};

// The four belt units around the trunk.
enum class Direction : std::uint8_t { Front = 0, Back = 1, Left = 2, Right = 3 };

enum class Axis { AP, ML };

constexpr Axis axis_of(Direction d) {
  return (d == Direction::Front || d == Direction::Back) ? Axis::AP : Axis::ML;
}

std::string to_string(Direction d);
Direction parse_direction(const std::string& name);

struct ActuatorCommand {
  Direction unit = Direction::Front;
  std::uint8_t intensity = 0;
  std::uint32_t duration_ms = 0;
  std::uint64_t seq = 0;  // strictly increasing per session; 8-bit on the wire
};

struct FeedbackConfig {
  double th_cop = 0.1;         // dead-zone half-width [m]
  double t_a = 0.5;            // anticipation interval [s]
  double pulse_duration = 0.4; // vibration pulse length [s]
  double tick_rate = 100.0;    // engine/simulation tick rate [Hz]
  std::uint8_t intensity = 128;

  void validate() const;
};

// Experimental conditions: feedback modality (none/visual/belt) crossed with
// eyes open/blindfolded.
enum class Condition { NF_O, NF_B, VF_O, EF_O, EF_B };

inline constexpr Condition kAllConditions[] = {
    Condition::NF_O, Condition::NF_B, Condition::VF_O, Condition::EF_O, Condition::EF_B};

std::string to_string(Condition c);
Condition parse_condition(const std::string& name);

constexpr bool is_belt_condition(Condition c) {
  return c == Condition::EF_O || c == Condition::EF_B;
}

}  // namespace copguide

#endif
