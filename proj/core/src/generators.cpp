#include "tracecause/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "tracecause/error.hpp"

namespace tracecause {

void validate(const MountainCarParams& p) {
  if (p.horizon < 1) throw Error(Errc::invalid_argument, "horizon must be >= 1");
  if (!(p.pos_lo < p.pos_hi) || !(p.vel_lo < p.vel_hi)) {
    throw Error(Errc::invalid_argument, "empty position or velocity bounds");
  }
  if (!(p.goal_pos >= p.pos_lo && p.goal_pos <= p.pos_hi)) {
    throw Error(Errc::invalid_argument, "goal position outside the position bounds");
  }
  if (!std::isfinite(p.g) || p.g < 0.0) throw Error(Errc::invalid_argument, "g must be >= 0");
}

CarState mountain_car_step(double pos, double vel, int action, const MountainCarParams& p) {
  CarState next;
  if (p.order == UpdateOrder::position_first) {
    next.pos = std::clamp(pos + vel, p.pos_lo, p.pos_hi);
    next.vel = std::clamp(vel + p.force * action - p.g * std::cos(3.0 * pos), p.vel_lo, p.vel_hi);
  } else {
    next.vel = std::clamp(vel + p.force * action - p.g * std::cos(3.0 * pos), p.vel_lo, p.vel_hi);
    next.pos = std::clamp(pos + next.vel, p.pos_lo, p.pos_hi);
  }
  return next;
}

int Policy::act(double, double vel, std::size_t) const {
  switch (kind) {
    case PolicyKind::always_right: return 1;
    case PolicyKind::always_left: return -1;
    case PolicyKind::bang_bang: return vel >= 0.0 ? 1 : -1;
    case PolicyKind::threshold: return vel >= threshold ? 1 : -1;
  }
  return 0;
}

std::string Policy::name() const {
  switch (kind) {
    case PolicyKind::always_right: return "always-right";
    case PolicyKind::always_left: return "always-left";
    case PolicyKind::bang_bang: return "bang-bang";
    case PolicyKind::threshold: return "threshold(" + format_real(threshold) + ")";
  }
  return "?";
}

std::vector<Policy> default_policies() {
  return {
      {PolicyKind::always_right, 0.0}, {PolicyKind::always_left, 0.0},
      {PolicyKind::bang_bang, 0.0},    {PolicyKind::threshold, 0.01},
      {PolicyKind::threshold, -0.01},  {PolicyKind::threshold, 0.02},
  };
}

Signature mountain_car_signature(const MountainCarParams& p) {
  validate(p);
  auto continuous = [](std::string name, VariableKind kind, double lo, double hi) {
    return VariableDecl{std::move(name), kind, ContinuousDomain{lo, hi}, kDefaultTolerance};
  };
  std::vector<VariableDecl> vars;
  vars.push_back(continuous("pos", VariableKind::endogenous, p.pos_lo, p.pos_hi));
  vars.push_back(continuous("vel", VariableKind::endogenous, p.vel_lo, p.vel_hi));
  vars.push_back(VariableDecl{"action", VariableKind::endogenous, DiscreteDomain{{"-1", "0", "1"}}, 0.0});
  vars.push_back(continuous("pos0", VariableKind::exogenous, p.pos_lo, p.pos_hi));
  vars.push_back(continuous("vel0", VariableKind::exogenous, p.vel_lo, p.vel_hi));
  vars.push_back(continuous("g", VariableKind::exogenous, 0.0, std::max(0.01, p.g)));
  return Signature(std::move(vars), {{"action", "vel"}, {"vel", "pos"}, {"pos", "vel"}});
}

Trace simulate(const Policy& policy, CarState init, const MountainCarParams& p,
               const Signature& signature, std::string id) {
  validate(p);
  const VarIndex pos_i = signature.require("pos");
  const VarIndex vel_i = signature.require("vel");
  const VarIndex act_i = signature.require("action");
  const VarIndex pos0_i = signature.require("pos0");
  const VarIndex vel0_i = signature.require("vel0");
  const VarIndex g_i = signature.require("g");
  const VariableDecl& action_decl = signature.variable(act_i);
  const std::size_t width = signature.size();

  std::vector<Value> cells;
  cells.reserve((p.horizon + 1) * width);
  CarState s = init;
  for (std::size_t step = 0;; ++step) {
    const int a = policy.act(s.pos, s.vel, step);
    const auto token = action_decl.token_of(std::to_string(a));
    if (!token) throw Error(Errc::out_of_domain, "policy produced action " + std::to_string(a));
    const std::size_t base = cells.size();
    cells.resize(base + width);
    cells[base + pos_i] = s.pos;
    cells[base + vel_i] = s.vel;
    cells[base + act_i] = *token;
    cells[base + pos0_i] = init.pos;
    cells[base + vel0_i] = init.vel;
    cells[base + g_i] = p.g;
    if (s.pos >= p.goal_pos || step == p.horizon) break;
    s = mountain_car_step(s.pos, s.vel, a, p);
  }
  return Trace(std::move(id), width, std::move(cells));
}

namespace {

// 53-bit uniform in [0, 1), fixed across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

GeneratedLog generate_log(const GeneratorConfig& config) {
  if (config.n < 1) throw Error(Errc::invalid_argument, "need at least one trace");
  if (config.policies.empty()) throw Error(Errc::invalid_argument, "need at least one policy");
  if (!(config.pos0_lo <= config.pos0_hi) || !(config.vel0_lo <= config.vel0_hi)) {
    throw Error(Errc::invalid_argument, "empty initial-state range");
  }
  auto signature = std::make_shared<const Signature>(mountain_car_signature(config.params));
  const MountainCarParams& p = config.params;
  if (config.pos0_lo < p.pos_lo || config.pos0_hi > p.pos_hi || config.vel0_lo < p.vel_lo ||
      config.vel0_hi > p.vel_hi) {
    throw Error(Errc::invalid_argument, "initial-state range outside the domain");
  }

  const std::size_t per_init = config.policies.size();
  const std::size_t inits = (config.n + per_init - 1) / per_init;
  std::mt19937_64 rng(config.seed);
  std::vector<CarState> starts(inits);
  for (auto& s : starts) {
    s.pos = config.pos0_lo + (config.pos0_hi - config.pos0_lo) * unit(rng);
    s.vel = config.vel0_lo + (config.vel0_hi - config.vel0_lo) * unit(rng);
  }

  const VarIndex pos_i = signature->require("pos");
  std::vector<std::shared_ptr<const Trace>> traces;
  traces.reserve(config.n);
  std::size_t successes = 0;
  char id[32];
  for (std::size_t i = 0; i < config.n; ++i) {
    std::snprintf(id, sizeof id, "mc%05zu", i);
    auto t = std::make_shared<const Trace>(
        simulate(config.policies[i % per_init], starts[i / per_init], p, *signature, id));
    if (t->real(t->last(), pos_i) >= p.goal_pos) ++successes;
    traces.push_back(std::move(t));
  }

  GeneratedLog out{signature, TraceLog(signature, std::move(traces)), successes,
                   static_cast<double>(successes) / static_cast<double>(config.n), std::nullopt};
  if (successes == 0 || successes == config.n) {
    out.warning = std::string("degenerate policy family: every trace ") +
                  (successes == 0 ? "fails" : "succeeds");
  }
  return out;
}

std::string failure_effect(const MountainCarParams& p) {
  // Reaching the goal clamps pos onto it exactly when the goal is the bound.
  if (p.goal_pos == p.pos_hi) return "pos(n) != " + format_real(p.goal_pos);
  return "pos(n) < " + format_real(p.goal_pos);
}

}  // namespace tracecause
