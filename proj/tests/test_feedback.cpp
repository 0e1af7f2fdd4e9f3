#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <random>
#include <set>

#include "copguide/feedback.hpp"

using namespace copguide;

namespace {

std::shared_ptr<const ReferencePath> ramp_path(double speed, double duration, double rate) {
  const auto n = static_cast<std::size_t>(std::llround(duration * rate)) + 1;
  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i].x = speed * static_cast<double>(i) / rate;
  }
  return std::make_shared<ReferencePath>(rate, std::move(pts));
}

std::shared_ptr<const ReferencePath> flat_path(double duration, double rate) {
  return ramp_path(0.0, duration, rate);
}

// Algorithm oracle written straight off the two independent branch pairs,
// used to cross-check decide().
std::set<Direction> branch_oracle(double dx, double dy, double th) {
  std::set<Direction> out;
  if (dx > th) out.insert(Direction::Back);
  else if (dx < -th) out.insert(Direction::Front);
  if (dy > th) out.insert(Direction::Left);
  else if (dy < -th) out.insert(Direction::Right);
  return out;
}

std::set<Direction> to_set(const Decision& d) {
  std::set<Direction> out;
  if (d.ap) out.insert(*d.ap);
  if (d.ml) out.insert(*d.ml);
  return out;
}

}  // namespace

TEST_CASE("anticipatory error on a linear ramp") {
  const auto path = ramp_path(0.2, 5.0, 100.0);
  FeedbackConfig cfg;
  cfg.t_a = 0.5;

  const CoPSample on_ref{1.0, path->lookup_ahead(1.0, 0.5).x, 0.0, true};
  const Vec2 zero = anticipatory_error(*path, on_ref, cfg);
  CHECK(zero.x == doctest::Approx(0.0));
  CHECK(zero.y == doctest::Approx(0.0));

  const CoPSample behind{1.0, 0.15, 0.0, true};
  const Vec2 err = anticipatory_error(*path, behind, cfg);
  CHECK(err.x == doctest::Approx(0.30 - 0.15).epsilon(1e-12));

  // sign convention: measured right of the anticipated reference -> negative
  const CoPSample right_of{1.0, 0.30, path->lookup_ahead(1.0, 0.5).y + 0.12, true};
  CHECK(anticipatory_error(*path, right_of, cfg).y == doctest::Approx(-0.12).epsilon(1e-12));

  const CoPSample invalid{1.0, 0.0, 0.0, false};
  CHECK_THROWS_AS(anticipatory_error(*path, invalid, cfg), InputError);
}

TEST_CASE("real error is the same-instant difference") {
  const auto path = ramp_path(0.2, 5.0, 100.0);
  const CoPSample s{1.0, 0.05, 0.0, true};
  const Vec2 err = real_error(*path, s);
  CHECK(err.x == doctest::Approx(0.15).epsilon(1e-12));
  const CoPSample on_ref{2.0, path->lookup(2.0).x, path->lookup(2.0).y, true};
  CHECK(real_error(*path, on_ref).x == doctest::Approx(0.0));
  CHECK_THROWS_AS(real_error(*path, CoPSample{1.0, 0.0, 0.0, false}), InputError);
}

TEST_CASE("with zero anticipation both errors coincide bitwise") {
  const auto path = ramp_path(0.17, 8.0, 100.0);
  FeedbackConfig cfg;
  cfg.t_a = 0.0;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> t_dist(0.0, 8.0);
  std::uniform_real_distribution<double> pos(-0.5, 0.5);
  for (int i = 0; i < 10000; ++i) {
    const CoPSample s{t_dist(rng), pos(rng), pos(rng), true};
    const Vec2 a = anticipatory_error(*path, s, cfg);
    const Vec2 r = real_error(*path, s);
    CHECK(std::memcmp(&a, &r, sizeof(Vec2)) == 0);
  }
}

TEST_CASE("decide covers the nine sign/threshold regions") {
  FeedbackConfig cfg;
  cfg.th_cop = 0.1;

  CHECK(to_set(decide(0.05, -0.05, cfg)).empty());
  CHECK(to_set(decide(0.15, 0.0, cfg)) == std::set<Direction>{Direction::Back});
  CHECK(to_set(decide(-0.15, 0.0, cfg)) == std::set<Direction>{Direction::Front});
  CHECK(to_set(decide(0.0, 0.15, cfg)) == std::set<Direction>{Direction::Left});
  CHECK(to_set(decide(0.0, -0.15, cfg)) == std::set<Direction>{Direction::Right});
  CHECK(to_set(decide(0.12, -0.12, cfg)) ==
        std::set<Direction>{Direction::Back, Direction::Right});

  // |error| == th exactly stays silent (strict comparisons)
  CHECK(to_set(decide(0.1, 0.0, cfg)).empty());
  CHECK(to_set(decide(-0.1, 0.1, cfg)).empty());

  const double grid[] = {-0.15, -0.1, -0.05, 0.0, 0.05, 0.1, 0.15};
  for (double dx : grid) {
    for (double dy : grid) {
      CHECK(to_set(decide(dx, dy, cfg)) == branch_oracle(dx, dy, cfg.th_cop));
    }
  }
}

TEST_CASE("decide properties: reflection oddness, per-axis exclusion") {
  FeedbackConfig cfg;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> err(-0.3, 0.3);
  const auto mirror_ap = [](Direction d) {
    return d == Direction::Back ? Direction::Front
           : d == Direction::Front ? Direction::Back
                                   : d;
  };
  const auto mirror_ml = [](Direction d) {
    return d == Direction::Left ? Direction::Right
           : d == Direction::Right ? Direction::Left
                                   : d;
  };
  for (int i = 0; i < 5000; ++i) {
    const double dx = err(rng), dy = err(rng);
    const Decision d = decide(dx, dy, cfg);
    if (d.ap) CHECK(axis_of(*d.ap) == Axis::AP);
    if (d.ml) CHECK(axis_of(*d.ml) == Axis::ML);

    const Decision nx = decide(-dx, dy, cfg);
    CHECK(nx.ap.has_value() == d.ap.has_value());
    if (d.ap) CHECK(*nx.ap == mirror_ap(*d.ap));
    CHECK(nx.ml == d.ml);

    const Decision ny = decide(dx, -dy, cfg);
    CHECK(ny.ml.has_value() == d.ml.has_value());
    if (d.ml) CHECK(*ny.ml == mirror_ml(*d.ml));
    CHECK(ny.ap == d.ap);
  }
}

TEST_CASE("engine holds an axis silent until its pulse expires") {
  FeedbackConfig cfg;  // 100 Hz, 0.4 s pulses
  const auto path = flat_path(5.0, 100.0);
  FeedbackEngine engine(cfg, path);

  // sustained violation for 1 s: measured 0.15 m behind the reference
  std::vector<double> command_times;
  for (int i = 0; i < 100; ++i) {
    const double t = static_cast<double>(i) / 100.0;
    for (const auto& cmd : engine.tick(CoPSample{t, -0.15, 0.0, true})) {
      CHECK(cmd.unit == Direction::Back);
      command_times.push_back(t);
    }
  }
  REQUIRE(command_times.size() == 3);
  CHECK(command_times[0] == doctest::Approx(0.0));
  CHECK(command_times[1] == doctest::Approx(0.4));
  CHECK(command_times[2] == doctest::Approx(0.8));
}

TEST_CASE("engine stays quiet inside the dead zone and on invalid samples") {
  FeedbackConfig cfg;
  const auto path = flat_path(5.0, 100.0);
  FeedbackEngine engine(cfg, path);
  for (int i = 0; i < 200; ++i) {
    const double t = static_cast<double>(i) / 100.0;
    CHECK(engine.tick(CoPSample{t, 0.05, -0.05, true}).empty());
  }
  CHECK(engine.tick(CoPSample{2.5, -5.0, 5.0, false}).empty());  // invalid: no commands
  CHECK_THROWS_AS(engine.tick(CoPSample{2.5, 0.0, 0.0, true}), InputError);  // stale clock
}

TEST_CASE("both axes fire on the same tick, AP first") {
  FeedbackConfig cfg;
  const auto path = flat_path(5.0, 100.0);
  FeedbackEngine engine(cfg, path);
  const auto cmds = engine.tick(CoPSample{0.0, -0.15, -0.15, true});
  REQUIRE(cmds.size() == 2);
  CHECK(cmds[0].unit == Direction::Back);
  CHECK(cmds[1].unit == Direction::Left);
  CHECK(cmds[0].seq + 1 == cmds[1].seq);
}

TEST_CASE("a pulse does not re-aim mid-flight when the decision flips") {
  FeedbackConfig cfg;
  const auto path = flat_path(5.0, 100.0);
  FeedbackEngine engine(cfg, path);
  auto first = engine.tick(CoPSample{0.0, -0.2, 0.0, true});
  REQUIRE(first.size() == 1);
  CHECK(first[0].unit == Direction::Back);
  // flip the sign inside the active pulse: nothing until expiry
  for (int i = 1; i < 40; ++i) {
    CHECK(engine.tick(CoPSample{i / 100.0, 0.2, 0.0, true}).empty());
  }
  const auto after = engine.tick(CoPSample{0.40, 0.2, 0.0, true});
  REQUIRE(after.size() == 1);
  CHECK(after[0].unit == Direction::Front);
}

TEST_CASE("zero-error stream emits nothing; command spacing is bounded") {
  FeedbackConfig cfg;
  const auto path = ramp_path(0.05, 10.0, 100.0);  // slow enough to stay in the dead zone
  FeedbackEngine quiet(cfg, path);
  for (int i = 0; i <= 1000; ++i) {
    const double t = static_cast<double>(i) / 100.0;
    const Vec2 ref = path->lookup_ahead(t, cfg.t_a);
    CHECK(quiet.tick(CoPSample{t, ref.x, ref.y, true}).empty());
  }

  // drive hard with a noisy stream; per-axis spacing stays >= pulse_duration
  FeedbackEngine engine(cfg, path);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(-0.6, 0.6);
  double last_ap = -1e9, last_ml = -1e9;
  for (int i = 0; i <= 2000; ++i) {
    const double t = static_cast<double>(i) / 100.0;
    for (const auto& cmd : engine.tick(CoPSample{t, pos(rng), pos(rng), true})) {
      double& last = axis_of(cmd.unit) == Axis::AP ? last_ap : last_ml;
      CHECK(t - last >= cfg.pulse_duration - 1e-9);
      last = t;
    }
  }
}

TEST_CASE("t_a = 0 degenerates to a dead-band controller on the real error") {
  FeedbackConfig plain;
  plain.t_a = 0.0;
  const auto path = ramp_path(0.2, 6.0, 100.0);
  FeedbackEngine engine(plain, path);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> noise(-0.25, 0.25);
  std::optional<ActivePulse> ap, ml;  // reference dead-band controller state
  std::uint64_t seq = 0;
  for (int i = 0; i <= 600; ++i) {
    const double t = static_cast<double>(i) / 100.0;
    const CoPSample s{t, path->lookup(t).x + noise(rng), noise(rng), true};
    const auto cmds = engine.tick(s);

    // oracle: decide on the real error, same pulse bookkeeping
    const Vec2 er = real_error(*path, s);
    std::vector<ActuatorCommand> expected;
    const Decision d = decide(er.x, er.y, plain);
    const auto consider = [&](std::optional<ActivePulse>& pulse, Direction unit) {
      if (pulse && t < pulse->expiry - 1e-9) return;
      expected.push_back({unit, plain.intensity, 400, seq++});
      pulse = ActivePulse{unit, t + plain.pulse_duration};
    };
    if (d.ap) consider(ap, *d.ap);
    if (d.ml) consider(ml, *d.ml);

    REQUIRE(cmds.size() == expected.size());
    for (std::size_t k = 0; k < cmds.size(); ++k) {
      CHECK(cmds[k].unit == expected[k].unit);
      CHECK(cmds[k].seq == expected[k].seq);
      CHECK(encode_command(cmds[k]) == encode_command(expected[k]));
    }
  }
}

TEST_CASE("command frame layout and checksum") {
  const ActuatorCommand cmd{Direction::Back, 128, 400, 1};
  const auto frame = encode_command(cmd);
  CHECK(frame[0] == 0xA5);
  CHECK(frame[1] == 0x01);  // Back
  CHECK(frame[2] == 0x01);
  CHECK(frame[3] == 0x80);
  CHECK(frame[4] == 0x01);  // 400 = 0x0190 big-endian
  CHECK(frame[5] == 0x90);
  CHECK(frame[6] == 0x01);  // seq mod 256
  std::uint8_t checksum = 0;
  for (int i = 0; i < 7; ++i) checksum ^= frame[i];
  CHECK(frame[7] == checksum);
  CHECK(frame[7] == 0xB5);

  const auto back = decode_frame(frame);
  CHECK(back.unit == cmd.unit);
  CHECK(back.intensity == cmd.intensity);
  CHECK(back.duration_ms == cmd.duration_ms);
  CHECK(back.seq == cmd.seq);
}

TEST_CASE("codec round-trips random commands") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> unit(0, 3);
  std::uniform_int_distribution<int> intensity(0, 255);
  std::uniform_int_distribution<int> duration(1, 65535);
  std::uniform_int_distribution<std::uint64_t> seq;
  for (int i = 0; i < 20000; ++i) {
    ActuatorCommand cmd;
    cmd.unit = static_cast<Direction>(unit(rng));
    cmd.intensity = static_cast<std::uint8_t>(intensity(rng));
    cmd.duration_ms = static_cast<std::uint32_t>(duration(rng));
    cmd.seq = seq(rng);
    const auto back = decode_frame(encode_command(cmd));
    CHECK(back.unit == cmd.unit);
    CHECK(back.intensity == cmd.intensity);
    CHECK(back.duration_ms == cmd.duration_ms);
    CHECK(back.seq == cmd.seq % 256);  // 8-bit wire field
  }
}

TEST_CASE("codec error contracts") {
  ActuatorCommand cmd{Direction::Front, 10, 70000, 0};
  CHECK_THROWS_AS(encode_command(cmd), InputError);
  cmd.duration_ms = 0;
  CHECK_THROWS_AS(encode_command(cmd), InputError);

  auto frame = encode_command(ActuatorCommand{Direction::Left, 5, 100, 7});
  frame[7] ^= 0x10;
  CHECK_THROWS_AS(decode_frame(frame), ProtocolError);
  frame[7] ^= 0x10;
  frame[0] = 0x00;
  CHECK_THROWS_AS(decode_frame(frame), ProtocolError);
}

TEST_CASE("identical inputs give identical command traces") {
  FeedbackConfig cfg;
  const auto path = ramp_path(0.2, 10.0, 100.0);
  std::vector<std::array<std::uint8_t, 8>> first, second;
  for (auto* sink : {&first, &second}) {
    FeedbackEngine engine(cfg, path);
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> noise(-0.3, 0.3);
    for (int i = 0; i <= 1000; ++i) {
      const double t = static_cast<double>(i) / 100.0;
      for (const auto& cmd : engine.tick(CoPSample{t, noise(rng), noise(rng), true})) {
        sink->push_back(encode_command(cmd));
      }
    }
  }
  CHECK(first == second);
}
