#include "copguide/simwalker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "text_util.hpp"

namespace copguide {

using detail::format_double;
using detail::parse_number;
using detail::split;
using detail::trim;

namespace {
// Noise profile shared by the presets: sigma0 for eyes-open conditions,
// doubled plus a veer bias when blindfolded.
constexpr double kDriftSigma0 = 0.05;
constexpr double kBlindDriftSigma = 2.0 * kDriftSigma0;
constexpr double kBlindBiasVx = 0.012;
constexpr double kBlindBiasVy = 0.010;
constexpr double kVisualGain = 1.0;

constexpr double kCueEdgeSlack = 1e-9;
}  // namespace

void WalkerParams::validate() const {
  if (!(reaction_latency >= 0.0)) throw InputError("reaction_latency must be non-negative");
  if (!(correction_speed > 0.0)) throw InputError("correction_speed must be positive");
  if (!(drift_sigma >= 0.0)) throw InputError("drift_sigma must be non-negative");
  if (!(visual_gain >= 0.0 && visual_gain <= 1.0)) {
    throw InputError("visual_gain must be in [0,1]");
  }
}

WalkerParams condition_preset(Condition c) {
  WalkerParams p;  // defaults give the eyes-open, no-feedback profile
  p.drift_sigma = kDriftSigma0;
  switch (c) {
    case Condition::NF_O:
    case Condition::EF_O:
      break;
    case Condition::NF_B:
    case Condition::EF_B:
      p.drift_sigma = kBlindDriftSigma;
      p.bias_vx = kBlindBiasVx;
      p.bias_vy = kBlindBiasVy;
      break;
    case Condition::VF_O:
      p.visual_gain = kVisualGain;
      break;
  }
  return p;
}

WalkerParams load_walker_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  WalkerParams p;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto row = trim(line);
    if (row.empty() || row.front() == '#') continue;
    auto eq = row.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("'" + path + "': expected key=value at line " + std::to_string(lineno));
    }
    auto key = trim(row.substr(0, eq));
    auto value = row.substr(eq + 1);
    if (key == "reaction_latency") {
      p.reaction_latency = parse_number<double>(value, "'" + path + "'", lineno);
    } else if (key == "correction_speed") {
      p.correction_speed = parse_number<double>(value, "'" + path + "'", lineno);
    } else if (key == "drift_sigma") {
      p.drift_sigma = parse_number<double>(value, "'" + path + "'", lineno);
    } else if (key == "bias_vx") {
      p.bias_vx = parse_number<double>(value, "'" + path + "'", lineno);
    } else if (key == "bias_vy") {
      p.bias_vy = parse_number<double>(value, "'" + path + "'", lineno);
    } else if (key == "visual_gain") {
      p.visual_gain = parse_number<double>(value, "'" + path + "'", lineno);
    } else if (key == "rng_seed") {
      p.rng_seed = parse_number<std::uint64_t>(value, "'" + path + "'", lineno);
    } else {
      throw InputError("'" + path + "': unknown key '" + std::string(key) + "' at line " +
                       std::to_string(lineno));
    }
  }
  p.validate();
  return p;
}

void save_walker_params(const WalkerParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << "reaction_latency=" << format_double(params.reaction_latency) << '\n'
      << "correction_speed=" << format_double(params.correction_speed) << '\n'
      << "drift_sigma=" << format_double(params.drift_sigma) << '\n'
      << "bias_vx=" << format_double(params.bias_vx) << '\n'
      << "bias_vy=" << format_double(params.bias_vy) << '\n'
      << "visual_gain=" << format_double(params.visual_gain) << '\n'
      << "rng_seed=" << params.rng_seed << '\n';
}

void CueInbox::push(const ActuatorCommand& cmd, double deliver_at) {
  queue_.push_back(Entry{cmd, deliver_at});
}

std::vector<CueInbox::Entry> CueInbox::deliver(double t) {
  std::vector<Entry> due;
  while (!queue_.empty() && queue_.front().deliver_at <= t) {
    due.push_back(queue_.front());
    queue_.pop_front();
  }
  return due;
}

Walker::Walker(const WalkerParams& params, Vec2 start)
    : params_(params), pos_(start), rng_(params.rng_seed), gauss_(0.0, 1.0) {
  params_.validate();
}

double Walker::cue_pull(const std::optional<CueEffect>& effect, double t, double dt) const {
  if (!effect) return 0.0;
  if (t <= effect->start || t > effect->until + kCueEdgeSlack) return 0.0;
  return effect->sign * params_.correction_speed * dt;
}

CoPSample Walker::step(const ReferencePath& path, double t, double dt,
                       std::span<const CueInbox::Entry> cues) {
  for (const auto& cue : cues) {
    // Repulsive response: move away from the vibrating unit.
    const double sign =
        (cue.cmd.unit == Direction::Back || cue.cmd.unit == Direction::Left) ? 1.0 : -1.0;
    const CueEffect effect{sign, cue.deliver_at,
                           cue.deliver_at + cue.cmd.duration_ms / 1000.0};
    (axis_of(cue.cmd.unit) == Axis::AP ? ap_cue_ : ml_cue_) = effect;
  }

  const Vec2 ref_now = path.lookup(t);
  const Vec2 ref_prev = path.lookup(t - dt);
  const double sigma_step = params_.drift_sigma * std::sqrt(dt);
  const double zx = gauss_(rng_);  // x before y, one pair per tick
  const double zy = gauss_(rng_);
  const double clip = params_.correction_speed * dt;

  // Nominal progression, noise and veer first; the visual pull then acts on
  // the error that remains, so an on-path noise-free walker stays on path.
  pos_.x += (ref_now.x - ref_prev.x) + sigma_step * zx + params_.bias_vx * dt +
            cue_pull(ap_cue_, t, dt);
  pos_.y += (ref_now.y - ref_prev.y) + sigma_step * zy + params_.bias_vy * dt +
            cue_pull(ml_cue_, t, dt);
  pos_.x += std::clamp(params_.visual_gain * (ref_now.x - pos_.x), -clip, clip);
  pos_.y += std::clamp(params_.visual_gain * (ref_now.y - pos_.y), -clip, clip);

  return CoPSample{t, pos_.x, pos_.y, true};
}

}  // namespace copguide
