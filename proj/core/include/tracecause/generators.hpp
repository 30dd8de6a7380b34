#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tracecause/trace_model.hpp"

namespace tracecause {

// position_first: pos' = pos + vel, vel' = vel + force*a - g*cos(3 pos).
// velocity_first computes vel' first and moves pos by it.
enum class UpdateOrder { position_first, velocity_first };

struct MountainCarParams {
  double g = 0.0025;
  std::size_t horizon = 100;
  double goal_pos = 0.6;
  double pos_lo = -1.2;
  double pos_hi = 0.6;
  double vel_lo = -0.07;
  double vel_hi = 0.07;
  double force = 0.001;
  UpdateOrder order = UpdateOrder::position_first;
};

// Throws Errc::invalid_argument.
void validate(const MountainCarParams& p);

struct CarState {
  double pos = 0.0;
  double vel = 0.0;
};

// One step of the dynamics, both results clamped to their bounds.
CarState mountain_car_step(double pos, double vel, int action, const MountainCarParams& p);

enum class PolicyKind { always_right, always_left, bang_bang, threshold };

// always_right: +1; always_left: -1; bang_bang: +1 when vel >= 0, else -1;
// threshold: +1 when vel >= threshold, else -1.
struct Policy {
  PolicyKind kind = PolicyKind::always_right;
  double threshold = 0.0;

  int act(double pos, double vel, std::size_t step) const;
  std::string name() const;
};

// always-right, always-left, bang-bang, threshold +0.01, -0.01, +0.02.
std::vector<Policy> default_policies();

// pos, vel, action (endogenous; action in {-1, 0, 1}) and the constant
// context columns pos0, vel0, g. Transition edges: action -> vel,
// vel -> pos, pos -> vel.
Signature mountain_car_signature(const MountainCarParams& p);

// Runs `policy` from (pos0, vel0) until pos >= goal_pos or `horizon` steps
// have been taken; every recorded state carries the action chosen in it.
Trace simulate(const Policy& policy, CarState init, const MountainCarParams& p,
               const Signature& signature, std::string id);

struct GeneratorConfig {
  std::size_t n = 1000;  // traces
  std::uint64_t seed = 0;
  MountainCarParams params;
  std::vector<Policy> policies = default_policies();
  double pos0_lo = -0.6;
  double pos0_hi = 0.0;
  double vel0_lo = -0.02;
  double vel0_hi = 0.02;
};

struct GeneratedLog {
  std::shared_ptr<const Signature> signature;
  TraceLog log;
  std::size_t successes = 0;
  double success_rate = 0.0;
  // Set when every trace has the same outcome.
  std::optional<std::string> warning;
};

// Trace i starts from seeded initial state i / P and follows policy i % P,
// for P policies, so consecutive traces share a context.
GeneratedLog generate_log(const GeneratorConfig& config);

// Effect formula text for "the car is not at the goal at the last step".
std::string failure_effect(const MountainCarParams& p);

}  // namespace tracecause
