#include "copguide/refpath.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "text_util.hpp"

namespace copguide {

using detail::format_double;
using detail::parse_number;
using detail::split;
using detail::trim;

void GaitParams::validate() const {
  if (!(step_length > 0.0)) throw InputError("step_length must be positive");
  if (!(step_period > 0.0)) throw InputError("step_period must be positive");
  if (!(ml_amplitude >= 0.0)) throw InputError("ml_amplitude must be non-negative");
  if (!(path_length > 0.0)) throw InputError("path_length must be positive");
  if (!(double_support_fraction >= 0.0 && double_support_fraction < 1.0)) {
    throw InputError("double_support_fraction must be in [0,1)");
  }
}

ReferencePath::ReferencePath(double rate, std::vector<Vec2> points)
    : rate_(rate), points_(std::move(points)) {
  if (!(rate_ > 0.0)) throw InputError("path rate must be positive");
  if (points_.size() < 2) throw InputError("path needs at least 2 points");
  for (const auto& p : points_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InputError("path contains non-finite point");
    }
  }
}

Vec2 ReferencePath::lookup(double t) const {
  double u = t * rate_;
  // Snap to the grid so lookups at sample instants return the stored point
  // exactly despite t = i/rate rounding.
  const double r = std::round(u);
  if (std::abs(u - r) < 1e-9) u = r;
  if (u <= 0.0) return points_.front();
  const double last = static_cast<double>(points_.size() - 1);
  if (u >= last) return points_.back();
  const auto i = static_cast<std::size_t>(u);
  const double f = u - static_cast<double>(i);
  if (f == 0.0) return points_[i];
  const Vec2& a = points_[i];
  const Vec2& b = points_[i + 1];
  return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
}

Vec2 ReferencePath::lookup_ahead(double t, double t_a) const {
  if (t_a < 0.0) throw InputError("anticipation interval must be non-negative");
  return lookup(t + t_a);
}

ReferencePath generate_gait_path(const GaitParams& params, double rate) {
  params.validate();
  if (!(rate > 0.0)) throw InputError("rate must be positive");

  const int n_steps =
      std::max(1, static_cast<int>(std::ceil(params.path_length / params.step_length - 1e-9)));
  std::vector<double> step_start(n_steps + 1, 0.0);
  for (int k = 0; k < n_steps; ++k) {
    step_start[k + 1] = std::min(params.path_length, step_start[k] + params.step_length);
  }

  const double duration = n_steps * params.step_period;
  const auto n_points = static_cast<std::size_t>(std::llround(duration * rate)) + 1;
  const double dwell = params.double_support_fraction;

  std::vector<Vec2> pts(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double t = static_cast<double>(i) / rate;
    int k = static_cast<int>(std::floor(t / params.step_period));
    k = std::clamp(k, 0, n_steps - 1);
    double u = t / params.step_period - k;
    u = std::clamp(u, 0.0, 1.0);
    // Eased progress through the step: flat during double support, then a
    // raised-cosine ramp across the single-support window.
    double progress = 0.0;
    if (u > dwell) {
      const double w = (u - dwell) / (1.0 - dwell);
      progress = 0.5 * (1.0 - std::cos(std::numbers::pi * w));
    }
    const double len = step_start[k + 1] - step_start[k];
    pts[i].x = step_start[k] + len * progress;
    // One sway cycle per two steps; the phase advances with the eased
    // progress so extremes land mid single-support and y is 0 in dwell.
    pts[i].y = params.ml_amplitude * std::sin(std::numbers::pi * (k + progress));
  }
  return ReferencePath(rate, std::move(pts));
}

void save_path(const ReferencePath& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw InputError("cannot write '" + file + "'");
  out << "# rate=" << format_double(path.rate()) << '\n';
  for (const auto& p : path.points()) {
    out << format_double(p.x) << ',' << format_double(p.y) << '\n';
  }
  if (!out) throw InputError("write failed for '" + file + "'");
}

ReferencePath load_path(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open '" + file + "'");
  std::string line;
  if (!std::getline(in, line)) throw InputError("'" + file + "': empty file");
  auto header = trim(line);
  constexpr std::string_view kPrefix = "# rate=";
  if (header.substr(0, kPrefix.size()) != kPrefix) {
    throw InputError("'" + file + "': missing '# rate=' header");
  }
  const double rate = parse_number<double>(header.substr(kPrefix.size()), "'" + file + "'", 1);
  if (!(rate > 0.0)) throw InputError("'" + file + "': rate must be positive");

  std::vector<Vec2> pts;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    auto row = trim(line);
    if (row.empty()) continue;
    auto fields = split(row, ',');
    if (fields.size() != 2) {
      throw InputError("'" + file + "': expected 2 columns at line " + std::to_string(lineno));
    }
    pts.push_back({parse_number<double>(fields[0], "'" + file + "'", lineno),
                   parse_number<double>(fields[1], "'" + file + "'", lineno)});
  }
  if (pts.size() < 2) throw InputError("'" + file + "': path needs at least 2 points");
  return ReferencePath(rate, std::move(pts));
}

}  // namespace copguide
