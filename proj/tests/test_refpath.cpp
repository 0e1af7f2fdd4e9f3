#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "copguide/refpath.hpp"

using namespace copguide;
namespace fs = std::filesystem;

namespace {

ReferencePath line_path(double x_end, double duration, double rate) {
  const auto n = static_cast<std::size_t>(std::llround(duration * rate)) + 1;
  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i].x = x_end * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return ReferencePath(rate, std::move(pts));
}

// Counts movement windows in a generated series: maximal runs of strictly
// positive forward increments.
int count_steps(const ReferencePath& path) {
  int steps = 0;
  bool moving = false;
  const auto& pts = path.points();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const bool inc = pts[i].x - pts[i - 1].x > 1e-12;
    if (inc && !moving) ++steps;
    moving = inc;
  }
  return steps;
}

}  // namespace

TEST_CASE("generated path starts at origin and ends at path_length") {
  const GaitParams params;
  const auto path = generate_gait_path(params, 100.0);
  CHECK(path.points().front().x == 0.0);
  CHECK(path.points().front().y == 0.0);
  CHECK(path.points().back().x == doctest::Approx(params.path_length).epsilon(1e-6));
  CHECK(path.duration() == doctest::Approx(20.0));
}

TEST_CASE("zero ml_amplitude gives a flat lateral profile") {
  GaitParams params;
  params.ml_amplitude = 0.0;
  const auto path = generate_gait_path(params, 100.0);
  for (const auto& p : path.points()) CHECK(p.y == 0.0);
}

TEST_CASE("3 m path with 0.3 m steps has exactly 10 steps") {
  GaitParams params;
  params.path_length = 3.0;
  params.step_length = 0.3;
  const auto path = generate_gait_path(params, 100.0);
  CHECK(count_steps(path) == 10);
  CHECK(path.points().back().x == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("within-step increments sum to step_length over each step window") {
  GaitParams params;  // step_period 2.0 at 100 Hz -> 200 samples per step
  const auto path = generate_gait_path(params, 100.0);
  const auto& pts = path.points();
  const int per_step = 200;
  for (int k = 0; k + 1 <= 10; ++k) {
    double sum = 0.0;
    for (int i = k * per_step; i < (k + 1) * per_step; ++i) {
      sum += pts[i + 1].x - pts[i].x;
    }
    CHECK(sum == doctest::Approx(params.step_length).epsilon(1e-9));
  }
}

TEST_CASE("generated paths: monotone x, sway peaks at the amplitude") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> step_len(0.2, 0.5);
  std::uniform_real_distribution<double> period(1.0, 3.0);
  std::uniform_real_distribution<double> amp(0.01, 0.1);
  std::uniform_real_distribution<double> dwell(0.0, 0.6);
  for (int iter = 0; iter < 20; ++iter) {
    GaitParams params;
    params.step_length = step_len(rng);
    params.step_period = period(rng);
    params.ml_amplitude = amp(rng);
    params.path_length = 3.0;
    params.double_support_fraction = dwell(rng);
    const auto path = generate_gait_path(params, 100.0);
    double max_abs_y = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
      CHECK(path.points()[i].x >= path.points()[i - 1].x);
      max_abs_y = std::max(max_abs_y, std::abs(path.points()[i].y));
    }
    CHECK(max_abs_y <= params.ml_amplitude + 1e-12);
    CHECK(max_abs_y >= params.ml_amplitude * 0.99);  // one-sample quantization
  }
}

TEST_CASE("lookup boundary and clamping contracts") {
  const auto path = line_path(1.0, 1.0, 10.0);
  const Vec2 first = path.lookup(0.0);
  CHECK(first.x == path.points().front().x);
  const Vec2 clamped = path.lookup(path.duration() + 10.0);
  CHECK(clamped.x == path.points().back().x);
  const Vec2 before = path.lookup(-5.0);
  CHECK(before.x == path.points().front().x);
  const Vec2 mid = path.lookup(0.25);
  CHECK(mid.x == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("lookup is continuous at grid resolution") {
  const auto path = generate_gait_path(GaitParams{}, 100.0);
  const double eps = 1e-4;
  for (double t = 0.0; t <= path.duration(); t += 0.37) {
    const Vec2 a = path.lookup(t);
    const Vec2 b = path.lookup(t + eps);
    CHECK(std::abs(b.x - a.x) < 1e-3);
    CHECK(std::abs(b.y - a.y) < 1e-3);
  }
}

TEST_CASE("lookup_ahead equals lookup at the shifted instant") {
  const auto path = generate_gait_path(GaitParams{}, 100.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> t_dist(-1.0, path.duration() + 1.0);
  std::uniform_real_distribution<double> ta_dist(0.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const double t = t_dist(rng);
    const double ta = ta_dist(rng);
    const Vec2 a = path.lookup_ahead(t, ta);
    const Vec2 b = path.lookup(t + ta);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
  }
  CHECK_THROWS_AS(path.lookup_ahead(1.0, -0.1), InputError);
}

TEST_CASE("lookup_ahead on a linear ramp") {
  // x(t) = 0.2 t over 5 s
  const auto path = line_path(1.0, 5.0, 100.0);
  const Vec2 v = path.lookup_ahead(1.0, 0.5);
  CHECK(v.x == doctest::Approx(0.30).epsilon(1e-12));
  CHECK(path.lookup_ahead(path.duration(), 3.0).x == path.points().back().x);
  const Vec2 same = path.lookup_ahead(1.7, 0.0);
  CHECK(same.x == path.lookup(1.7).x);
}

TEST_CASE("save/load round-trips bit-exactly") {
  const auto path = generate_gait_path(GaitParams{}, 100.0);
  const auto file = fs::temp_directory_path() / "cg_path_roundtrip.csv";
  save_path(path, file.string());
  const auto back = load_path(file.string());
  CHECK(back.rate() == path.rate());
  REQUIRE(back.size() == path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    CHECK(back.points()[i].x == path.points()[i].x);
    CHECK(back.points()[i].y == path.points()[i].y);
  }
}

TEST_CASE("load_path rejects bad files") {
  const auto one_point = fs::temp_directory_path() / "cg_path_one.csv";
  {
    std::ofstream out(one_point);
    out << "# rate=100\n0.0,0.0\n";
  }
  CHECK_THROWS_AS(load_path(one_point.string()), InputError);

  const auto no_header = fs::temp_directory_path() / "cg_path_nohdr.csv";
  {
    std::ofstream out(no_header);
    out << "0.0,0.0\n0.1,0.0\n";
  }
  CHECK_THROWS_AS(load_path(no_header.string()), InputError);

  const auto bad_rate = fs::temp_directory_path() / "cg_path_badrate.csv";
  {
    std::ofstream out(bad_rate);
    out << "# rate=-5\n0.0,0.0\n0.1,0.0\n";
  }
  CHECK_THROWS_AS(load_path(bad_rate.string()), InputError);
  CHECK_THROWS_AS(load_path("/nonexistent/path.csv"), InputError);
}

TEST_CASE("shipped fixture matches its metadata") {
  const auto fixture = fs::path(COPGUIDE_DATA_DIR) / "slowwalk_3m.csv";
  const auto path = load_path(fixture.string());
  CHECK(path.rate() == 100.0);
  // duration recomputed from the file contents: (N-1)/rate
  const double expected = static_cast<double>(path.size() - 1) / path.rate();
  CHECK(path.duration() == expected);
  CHECK(path.duration() == doctest::Approx(20.0));
  CHECK(path.points().back().x == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("GaitParams validation") {
  GaitParams params;
  params.step_length = 0.0;
  CHECK_THROWS_AS(generate_gait_path(params, 100.0), InputError);
  params = GaitParams{};
  params.double_support_fraction = 1.0;
  CHECK_THROWS_AS(generate_gait_path(params, 100.0), InputError);
  params = GaitParams{};
  CHECK_THROWS_AS(generate_gait_path(params, 0.0), InputError);
}
