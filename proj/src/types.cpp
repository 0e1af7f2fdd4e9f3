#include "copguide/types.hpp"

namespace copguide {

std::string to_string(Direction d) {
  switch (d) {
    case Direction::Front: return "Front";
    case Direction::Back: return "Back";
    case Direction::Left: return "Left";
    case Direction::Right: return "Right";
  }
  throw std::logic_error("bad Direction");
}

Direction parse_direction(const std::string& name) {
  if (name == "Front") return Direction::Front;
  if (name == "Back") return Direction::Back;
  if (name == "Left") return Direction::Left;
  if (name == "Right") return Direction::Right;
  throw InputError("unknown direction '" + name + "'");
}

void FeedbackConfig::validate() const {
  if (!(th_cop > 0.0)) throw InputError("th_cop must be positive");
  if (!(t_a >= 0.0)) throw InputError("t_a must be non-negative");
  if (!(pulse_duration > 0.0)) throw InputError("pulse_duration must be positive");
  if (!(tick_rate > 0.0)) throw InputError("tick_rate must be positive");
}

std::string to_string(Condition c) {
  switch (c) {
    case Condition::NF_O: return "NF_O";
    case Condition::NF_B: return "NF_B";
    case Condition::VF_O: return "VF_O";
    case Condition::EF_O: return "EF_O";
    case Condition::EF_B: return "EF_B";
  }
  throw std::logic_error("bad Condition");
}

Condition parse_condition(const std::string& name) {
  std::string n = name;
  for (auto& ch : n) {
    if (ch == '/') ch = '_';  // accept the NF/O spelling too
  }
  for (Condition c : kAllConditions) {
    if (to_string(c) == n) return c;
  }
  throw InputError("unknown condition '" + name + "'");
}

}  // namespace copguide
