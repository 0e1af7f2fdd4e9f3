#include "copguide/copstream.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "text_util.hpp"

namespace copguide {

using detail::format_double;
using detail::parse_number;
using detail::split;
using detail::trim;

namespace {

constexpr double kTimeSnap = 1e-9;  // grid/sample coincidence tolerance [s]

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

}  // namespace

PlateLayout load_plate_layout(const std::string& path) {
  auto in = open_or_throw(path);
  PlateLayout layout;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto row = trim(line);
    if (row.empty()) continue;
    if (lineno == 1 && row.substr(0, 8) == "plate_id") continue;
    auto fields = split(row, ',');
    if (fields.size() != 3) {
      throw InputError("layout '" + path + "': expected 3 columns at line " +
                       std::to_string(lineno));
    }
    int id = parse_number<int>(fields[0], "layout '" + path + "'", lineno);
    Vec2 origin{parse_number<double>(fields[1], "layout '" + path + "'", lineno),
                parse_number<double>(fields[2], "layout '" + path + "'", lineno)};
    if (!layout.origins.emplace(id, origin).second) {
      throw InputError("layout '" + path + "': duplicate plate id " + std::to_string(id) +
                       " at line " + std::to_string(lineno));
    }
  }
  if (layout.origins.empty()) throw InputError("layout '" + path + "': no plates");
  return layout;
}

std::vector<PlateFrame> parse_plate_file(const std::string& path, const PlateLayout& layout) {
  auto in = open_or_throw(path);
  std::vector<PlateFrame> frames;
  std::map<int, double> last_t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto row = trim(line);
    if (row.empty()) continue;
    if (lineno == 1 && row.substr(0, 2) == "t,") continue;  // header
    auto fields = split(row, ',');
    if (fields.size() != 5) {
      throw InputError("'" + path + "': expected 5 columns, got " +
                       std::to_string(fields.size()) + " at line " + std::to_string(lineno));
    }
    PlateFrame f;
    f.t = parse_number<double>(fields[0], "'" + path + "'", lineno);
    f.plate_id = parse_number<int>(fields[1], "'" + path + "'", lineno);
    f.fz = parse_number<double>(fields[2], "'" + path + "'", lineno);
    f.cop_local_x = parse_number<double>(fields[3], "'" + path + "'", lineno);
    f.cop_local_y = parse_number<double>(fields[4], "'" + path + "'", lineno);
    if (!std::isfinite(f.t) || !std::isfinite(f.fz) || f.fz < 0.0) {
      throw InputError("'" + path + "': bad t/fz at line " + std::to_string(lineno));
    }
    auto origin = layout.origins.find(f.plate_id);
    if (origin == layout.origins.end()) {
      throw InputError("'" + path + "': unknown plate id " + std::to_string(f.plate_id) +
                       " at line " + std::to_string(lineno));
    }
    f.origin_x = origin->second.x;
    f.origin_y = origin->second.y;
    auto [it, fresh] = last_t.emplace(f.plate_id, f.t);
    if (!fresh) {
      if (f.t < it->second) {
        throw InputError("'" + path + "': non-monotonic timestamp for plate " +
                         std::to_string(f.plate_id) + " at line " + std::to_string(lineno));
      }
      it->second = f.t;
    }
    frames.push_back(f);
  }
  std::stable_sort(frames.begin(), frames.end(), [](const PlateFrame& a, const PlateFrame& b) {
    return a.t != b.t ? a.t < b.t : a.plate_id < b.plate_id;
  });
  return frames;
}

CoPSample fuse_plates(std::span<const PlateFrame> frames, double contact_threshold,
                      std::optional<Vec2> last_valid) {
  if (frames.empty()) throw InputError("fuse_plates: empty input");
  const double t = frames.front().t;
  // Accumulate in plate-id order so the result is independent of the
  // caller's frame ordering.
  std::vector<const PlateFrame*> ordered;
  ordered.reserve(frames.size());
  for (const auto& f : frames) {
    if (f.t != t) throw InputError("fuse_plates: mismatched timestamps");
    ordered.push_back(&f);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const PlateFrame* a, const PlateFrame* b) { return a->plate_id < b->plate_id; });

  double total_fz = 0.0, wx = 0.0, wy = 0.0;
  for (const PlateFrame* f : ordered) {
    total_fz += f->fz;
    wx += f->fz * f->global_x();
    wy += f->fz * f->global_y();
  }
  CoPSample s;
  s.t = t;
  if (total_fz >= contact_threshold) {
    s.x = wx / total_fz;
    s.y = wy / total_fz;
    s.valid = true;
  } else {
    Vec2 hold = last_valid.value_or(Vec2{});
    s.x = hold.x;
    s.y = hold.y;
    s.valid = false;
  }
  return s;
}

std::vector<CoPSample> fuse_recording(std::span<const PlateFrame> frames,
                                      double contact_threshold) {
  std::vector<PlateFrame> sorted(frames.begin(), frames.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const PlateFrame& a, const PlateFrame& b) {
    return a.t != b.t ? a.t < b.t : a.plate_id < b.plate_id;
  });
  std::vector<CoPSample> out;
  std::optional<Vec2> last_valid;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].t == sorted[i].t) ++j;
    CoPSample s = fuse_plates(std::span(sorted).subspan(i, j - i), contact_threshold, last_valid);
    if (s.valid) last_valid = Vec2{s.x, s.y};
    out.push_back(s);
    i = j;
  }
  return out;
}

std::vector<CoPSample> resample_uniform(std::span<const CoPSample> samples, double rate,
                                        double max_gap) {
  if (!(rate > 0.0)) throw InputError("resample_uniform: rate must be positive");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].t > samples[i - 1].t)) {
      throw InputError("resample_uniform: non-increasing timestamps");
    }
  }
  std::vector<std::size_t> valid_idx;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].valid) valid_idx.push_back(i);
  }
  if (valid_idx.size() < 2) {
    throw InputError("resample_uniform: need at least 2 valid samples");
  }

  const double t0 = samples.front().t;
  const double t_end = samples.back().t;
  const auto n_grid =
      static_cast<std::size_t>(std::floor((t_end - t0) * rate + kTimeSnap * rate)) + 1;

  std::vector<CoPSample> out;
  out.reserve(n_grid);
  std::size_t exact = 0;  // next candidate for an exact grid hit
  std::size_t vright = 0; // first valid sample with t >= grid time
  for (std::size_t i = 0; i < n_grid; ++i) {
    const double t = t0 + static_cast<double>(i) / rate;

    while (exact + 1 < samples.size() && samples[exact].t < t - kTimeSnap) ++exact;
    if (std::abs(samples[exact].t - t) <= kTimeSnap) {
      out.push_back(samples[exact]);
      continue;
    }

    while (vright < valid_idx.size() && samples[valid_idx[vright]].t < t) ++vright;
    CoPSample s;
    s.t = t;
    if (vright == 0) {  // before the first valid sample
      const auto& nearest = samples[valid_idx.front()];
      s.x = nearest.x;
      s.y = nearest.y;
      s.valid = false;
    } else if (vright == valid_idx.size()) {  // past the last valid sample
      const auto& nearest = samples[valid_idx.back()];
      s.x = nearest.x;
      s.y = nearest.y;
      s.valid = false;
    } else {
      const auto& lo = samples[valid_idx[vright - 1]];
      const auto& hi = samples[valid_idx[vright]];
      const double gap = hi.t - lo.t;
      const double f = (t - lo.t) / gap;
      s.x = lo.x + f * (hi.x - lo.x);
      s.y = lo.y + f * (hi.y - lo.y);
      // An invalid stretch between the bracketing valid samples is bridged
      // only while shorter than max_gap; sparse but valid data interpolates
      // freely.
      const bool adjacent = valid_idx[vright] - valid_idx[vright - 1] == 1;
      s.valid = adjacent || gap <= max_gap + kTimeSnap;
      if (!s.valid) {  // hold instead of bridging a long no-contact stretch
        s.x = lo.x;
        s.y = lo.y;
      }
    }
    out.push_back(s);
  }
  return out;
}

void write_cop_csv(const std::string& path, std::span<const CoPSample> samples) {
  std::ofstream outf(path);
  if (!outf) throw InputError("cannot write '" + path + "'");
  outf << "t,x,y,valid\n";
  for (const auto& s : samples) {
    outf << format_double(s.t) << ',' << format_double(s.x) << ',' << format_double(s.y) << ','
         << (s.valid ? 1 : 0) << '\n';
  }
  if (!outf) throw InputError("write failed for '" + path + "'");
}

std::vector<CoPSample> read_cop_csv(const std::string& path) {
  auto in = open_or_throw(path);
  std::vector<CoPSample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto row = trim(line);
    if (row.empty()) continue;
    if (lineno == 1 && row.substr(0, 2) == "t,") continue;
    auto fields = split(row, ',');
    if (fields.size() != 4) {
      throw InputError("'" + path + "': expected 4 columns at line " + std::to_string(lineno));
    }
    CoPSample s;
    s.t = parse_number<double>(fields[0], "'" + path + "'", lineno);
    s.x = parse_number<double>(fields[1], "'" + path + "'", lineno);
    s.y = parse_number<double>(fields[2], "'" + path + "'", lineno);
    s.valid = parse_number<int>(fields[3], "'" + path + "'", lineno) != 0;
    out.push_back(s);
  }
  return out;
}

}  // namespace copguide
