#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "tracecause/generators.hpp"

using namespace tracecause;
using fixtures::error_of;

namespace {

Policy policy(PolicyKind kind, double threshold = 0.0) { return Policy{kind, threshold}; }

}  // namespace

TEST_CASE("one step of the dynamics") {
  const MountainCarParams p;
  const CarState s = mountain_car_step(0.0, 0.01, 1, p);
  CHECK(s.pos == doctest::Approx(0.01));
  CHECK(s.vel == doctest::Approx(0.0085));
  MountainCarParams flat;
  flat.g = 0.0;
  const CarState rest = mountain_car_step(0.0, 0.0, 0, flat);
  CHECK(rest.pos == 0.0);
  CHECK(rest.vel == 0.0);
}

TEST_CASE("velocity and position are clamped") {
  MountainCarParams p;
  p.g = 0.0;
  CHECK(mountain_car_step(0.0, 0.0695, 1, p).vel == 0.07);
  CHECK(mountain_car_step(0.0, -0.0695, -1, p).vel == -0.07);
  CHECK(mountain_car_step(0.59, 0.05, 1, p).pos == 0.6);
  CHECK(mountain_car_step(-1.19, -0.05, -1, p).pos == -1.2);
}

TEST_CASE("velocity-first order") {
  MountainCarParams p;
  p.order = UpdateOrder::velocity_first;
  const CarState s = mountain_car_step(0.0, 0.01, 1, p);
  CHECK(s.vel == doctest::Approx(0.0085));
  CHECK(s.pos == doctest::Approx(0.0085));
}

TEST_CASE("policies") {
  CHECK(policy(PolicyKind::always_right).act(0, -0.05, 0) == 1);
  CHECK(policy(PolicyKind::always_left).act(0, 0.05, 0) == -1);
  CHECK(policy(PolicyKind::bang_bang).act(0, 0.0, 0) == 1);
  CHECK(policy(PolicyKind::bang_bang).act(0, -0.001, 0) == -1);
  CHECK(policy(PolicyKind::threshold, 0.01).act(0, 0.005, 0) == -1);
  CHECK(policy(PolicyKind::threshold, 0.01).act(0, 0.01, 0) == 1);
  const auto all = default_policies();
  CHECK(all.size() == 6);
  std::set<std::string> names;
  for (const auto& q : all) names.insert(q.name());
  CHECK(names.size() == 6);
}

TEST_CASE("always-right from (0, 0.02) does not reach the goal in 100 steps") {
  const MountainCarParams p;
  const Signature sig = mountain_car_signature(p);
  const Trace t = simulate(policy(PolicyKind::always_right), {0.0, 0.02}, p, sig, "r");
  CHECK(t.size() == 101);
  for (std::size_t s = 0; s < t.size(); ++s) CHECK(t.real(s, 0) < 0.6);
}

TEST_CASE("bang-bang from (0, 0.02) reaches the goal") {
  MountainCarParams p;
  p.horizon = 150;
  const Signature sig = mountain_car_signature(p);
  const Trace t = simulate(policy(PolicyKind::bang_bang), {0.0, 0.02}, p, sig, "b");
  CHECK(t.real(t.last(), 0) >= 0.6);
  CHECK(t.size() <= 151);
  for (std::size_t s = 0; s + 1 < t.size(); ++s) CHECK(t.real(s, 0) < 0.6);
}

TEST_CASE("a horizon of 1 gives at most two states") {
  MountainCarParams p;
  p.horizon = 1;
  const Signature sig = mountain_car_signature(p);
  for (const auto& q : default_policies()) {
    CHECK(simulate(q, {-0.5, 0.0}, p, sig, "h").size() <= 2);
  }
}

TEST_CASE("recorded actions and context columns") {
  const MountainCarParams p;
  const Signature sig = mountain_car_signature(p);
  const Trace t = simulate(policy(PolicyKind::bang_bang), {-0.3, 0.01}, p, sig, "c");
  for (std::size_t s = 0; s < t.size(); ++s) {
    const double vel = t.real(s, 1);
    CHECK(static_cast<int>(t.token(s, 2)) - 1 == (vel >= 0 ? 1 : -1));
    CHECK(t.real(s, 3) == -0.3);
    CHECK(t.real(s, 4) == 0.01);
    CHECK(t.real(s, 5) == p.g);
  }
  for (std::size_t s = 0; s + 1 < t.size(); ++s) {
    const CarState next = mountain_car_step(t.real(s, 0), t.real(s, 1),
                                            static_cast<int>(t.token(s, 2)) - 1, p);
    CHECK(t.real(s + 1, 0) == next.pos);
    CHECK(t.real(s + 1, 1) == next.vel);
  }
}

TEST_CASE("signature") {
  const Signature sig = mountain_car_signature(MountainCarParams{});
  CHECK(sig.names(sig.endogenous()) == std::vector<std::string>{"pos", "vel", "action"});
  CHECK(sig.names(sig.exogenous()) == std::vector<std::string>{"pos0", "vel0", "g"});
  CHECK(sig.reachable_from({2}) == VarSet{0, 1, 2});
}

TEST_CASE("generated logs") {
  GeneratorConfig cfg;
  cfg.n = 1000;
  cfg.seed = 7;
  const GeneratedLog g = generate_log(cfg);
  CHECK(g.log.size() == 1000);
  CHECK(g.success_rate > 0.0);
  CHECK(g.success_rate < 0.5);
  CHECK_FALSE(g.warning);
  CHECK(g.log[0].id() == "mc00000");
  CHECK(g.log[999].id() == "mc00999");
  std::size_t successes = 0;
  for (std::size_t i = 0; i < g.log.size(); ++i) {
    const Trace& t = g.log[i];
    CHECK(t.size() <= cfg.params.horizon + 1);
    const bool reached = t.real(t.last(), 0) >= cfg.params.goal_pos;
    successes += reached;
    for (std::size_t s = 0; s < t.size(); ++s) {
      CHECK(std::fabs(t.real(s, 1)) <= 0.07);
      if (s + 1 < t.size()) CHECK(t.real(s, 0) < cfg.params.goal_pos);
    }
  }
  CHECK(successes == g.successes);
  // Consecutive traces share a start state.
  CHECK(g.log[0].real(0, 3) == g.log[5].real(0, 3));
  CHECK(g.log[0].real(0, 3) != g.log[6].real(0, 3));
}

TEST_CASE("generation is deterministic and round-trips") {
  GeneratorConfig cfg;
  cfg.n = 200;
  cfg.seed = 3;
  const GeneratedLog a = generate_log(cfg);
  const GeneratedLog b = generate_log(cfg);
  const std::string text = serialize_trace_log(a.log);
  CHECK(text == serialize_trace_log(b.log));
  const TraceLog parsed = parse_trace_log(text, a.signature);
  CHECK(serialize_trace_log(parsed) == text);
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    for (std::size_t s = 0; s < a.log[i].size(); ++s) {
      CHECK(parsed[i].real(s, 0) == a.log[i].real(s, 0));
    }
  }
  cfg.seed = 4;
  CHECK(serialize_trace_log(generate_log(cfg).log) != text);
}

TEST_CASE("single-outcome families are flagged") {
  GeneratorConfig cfg;
  cfg.n = 1;
  cfg.policies = {policy(PolicyKind::always_right)};
  const GeneratedLog g = generate_log(cfg);
  CHECK(g.log.size() == 1);
  CHECK(g.warning);
}

TEST_CASE("parameter validation") {
  MountainCarParams p;
  p.horizon = 0;
  CHECK(error_of([&] { validate(p); }) == Errc::invalid_argument);
  p = MountainCarParams{};
  p.goal_pos = 1.0;
  CHECK(error_of([&] { validate(p); }) == Errc::invalid_argument);
  GeneratorConfig cfg;
  cfg.n = 0;
  CHECK(error_of([&] { generate_log(cfg); }) == Errc::invalid_argument);
}

TEST_CASE("failure effect text") {
  CHECK(failure_effect(MountainCarParams{}) == "pos(n) != 0.6");
  MountainCarParams p;
  p.goal_pos = 0.5;
  CHECK(failure_effect(p) == "pos(n) < 0.5");
}
