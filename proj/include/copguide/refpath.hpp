#ifndef COPGUIDE_REFPATH_HPP
#define COPGUIDE_REFPATH_HPP

#include <string>
#include <vector>

#include "copguide/types.hpp"

namespace copguide {

// Parameters of the synthetic slow-walk CoP path.
struct GaitParams {
  double step_length = 0.3;              // [m]
  double step_period = 2.0;              // [s]
  double ml_amplitude = 0.05;            // lateral sway half-width [m]
  double path_length = 3.0;              // [m]
  double double_support_fraction = 0.3;  // dwell share of each step, [0,1)

  void validate() const;
};

// Uniformly sampled planar reference CoP trajectory. Immutable after
// construction; lookups are clamped to [0, duration].
class ReferencePath {
 public:
  ReferencePath(double rate, std::vector<Vec2> points);

  double rate() const { return rate_; }
  std::size_t size() const { return points_.size(); }
  double duration() const { return static_cast<double>(points_.size() - 1) / rate_; }
  const std::vector<Vec2>& points() const { return points_; }

  // Clamped linear interpolation; total over all t.
  Vec2 lookup(double t) const;

  // lookup(t + t_a); t_a must be non-negative.
  Vec2 lookup_ahead(double t, double t_a) const;

 private:
  double rate_;
  std::vector<Vec2> points_;
};

// Synthesizes a slow-walk path: forward progression of one step_length per
// step_period with sinusoidal easing, dwelling during the double-support
// fraction at the start of each step; lateral sway of one cycle per two
// steps whose extremes fall mid single-support. Starts at (0,0), ends at
// x = path_length.
ReferencePath generate_gait_path(const GaitParams& params, double rate);

// Path file: header `# rate=<hz>`, then `x,y` rows in meters. Save/load
// round-trips bit-exactly.
void save_path(const ReferencePath& path, const std::string& file);
ReferencePath load_path(const std::string& file);

}  // namespace copguide

#endif
