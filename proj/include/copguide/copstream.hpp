#ifndef COPGUIDE_COPSTREAM_HPP
#define COPGUIDE_COPSTREAM_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "copguide/types.hpp"

namespace copguide {

// One force-plate reading, placed in the global frame via the layout's
// per-plate origin.
struct PlateFrame {
  int plate_id = 0;
  double t = 0.0;            // [s]
  double fz = 0.0;           // vertical force [N]
  double cop_local_x = 0.0;  // CoP in the plate frame [m]
  double cop_local_y = 0.0;
  double origin_x = 0.0;     // plate origin in the global frame [m]
  double origin_y = 0.0;

  double global_x() const { return origin_x + cop_local_x; }
  double global_y() const { return origin_y + cop_local_y; }
};

struct PlateLayout {
  std::map<int, Vec2> origins;
};

inline constexpr double kDefaultContactThreshold = 20.0;  // total fz [N]
inline constexpr double kDefaultMaxGap = 0.2;             // [s]

// CSV `plate_id,origin_x,origin_y`, one row per plate, meters.
PlateLayout load_plate_layout(const std::string& path);

// CSV `t,plate_id,fz,cop_x,cop_y` (header optional). Frames come back
// sorted by (t, plate_id). Malformed rows and unknown plate ids are
// reported with their line number; timestamps must be non-decreasing
// per plate.
std::vector<PlateFrame> parse_plate_file(const std::string& path, const PlateLayout& layout);

// Force-weighted centroid of the frames at one instant (at most one frame
// per plate; all timestamps equal). Below `contact_threshold` total force
// the sample is invalid and holds `last_valid` (the origin if none).
CoPSample fuse_plates(std::span<const PlateFrame> frames, double contact_threshold,
                      std::optional<Vec2> last_valid = std::nullopt);

// Groups frames by timestamp and fuses each group, carrying the last valid
// position through no-contact stretches.
std::vector<CoPSample> fuse_recording(std::span<const PlateFrame> frames,
                                      double contact_threshold = kDefaultContactThreshold);

// Linear interpolation onto a uniform grid spanning [t_first, t_last].
// Grid points bridged by valid samples closer than `max_gap` stay valid;
// anything else comes out invalid, holding the nearest valid position.
// Grid points that coincide with an input sample copy it exactly, so the
// operation is the identity on already-uniform input.
std::vector<CoPSample> resample_uniform(std::span<const CoPSample> samples, double rate,
                                        double max_gap = kDefaultMaxGap);

// Fused-CoP CSV: `t,x,y,valid`.
void write_cop_csv(const std::string& path, std::span<const CoPSample> samples);
std::vector<CoPSample> read_cop_csv(const std::string& path);

}  // namespace copguide

#endif
