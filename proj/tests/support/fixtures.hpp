#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tracecause/error.hpp"
#include "tracecause/formula.hpp"
#include "tracecause/trace_model.hpp"

namespace fixtures {

using namespace tracecause;

inline std::string data_path(const std::string& rel) {
  return std::string(TRACECAUSE_SOURCE_DIR) + "/data/" + rel;
}

inline std::shared_ptr<const Signature> example_signature() {
  return std::make_shared<const Signature>(load_signature(data_path("three_traces/signature.json")));
}

inline TraceLog example_log() { return load_trace_log(data_path("three_traces/log.csv"), example_signature()); }

inline const char* kFailure = "pos(n) != 0.6";

// Code of the tracecause::Error thrown by `f`, if any.
template <class F>
std::optional<Errc> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  bool chance(double p) { return static_cast<double>(gen_() >> 11) * 0x1.0p-53 < p; }
  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// a: {0,1,2} -> x: [0,1] (transition edge); y: {0,1} unconnected; u: {0,1}
// exogenous. W = {y} for causes over a.
inline std::shared_ptr<const Signature> toy_signature() {
  std::vector<VariableDecl> vars;
  vars.push_back({"a", VariableKind::endogenous, DiscreteDomain{{"0", "1", "2"}}, 0.0});
  vars.push_back({"x", VariableKind::endogenous, ContinuousDomain{0.0, 1.0}, 1e-6});
  vars.push_back({"y", VariableKind::endogenous, DiscreteDomain{{"0", "1"}}, 0.0});
  vars.push_back({"u", VariableKind::exogenous, DiscreteDomain{{"0", "1"}}, 0.0});
  return std::make_shared<const Signature>(std::move(vars), std::vector<Edge>{{"a", "x"}});
}

inline Value random_cell(Rng& rng, const VariableDecl& d) {
  if (d.discrete()) {
    return Token{static_cast<std::int32_t>(rng.below(d.discrete_domain().values.size()))};
  }
  static const double pool[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  double x = pool[rng.below(5)];
  if (rng.chance(0.1)) x = std::min(1.0, x + 5e-7);  // within tolerance
  return x;
}

// Small random log; about half the traces are mutated copies of earlier ones
// so that equivalences actually occur.
inline TraceLog random_log(Rng& rng, std::shared_ptr<const Signature> sig,
                           std::size_t max_traces = 20, std::size_t max_steps = 20) {
  const std::size_t n = 1 + rng.below(max_traces);
  const std::size_t width = sig->size();
  std::vector<std::shared_ptr<const Trace>> traces;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Value> cells;
    if (!traces.empty() && rng.chance(0.5)) {
      const Trace& src = *traces[rng.below(traces.size())];
      for (std::size_t s = 0; s < src.size(); ++s) {
        for (VarIndex v = 0; v < width; ++v) cells.push_back(src.at(s, v));
      }
      const std::size_t edits = rng.below(3);
      for (std::size_t e = 0; e < edits; ++e) {
        const std::size_t s = rng.below(src.size());
        const VarIndex v = rng.below(width);
        if (!sig->variable(v).endogenous()) continue;
        cells[s * width + v] = random_cell(rng, sig->variable(v));
      }
    } else {
      const std::size_t len = 1 + rng.below(max_steps);
      std::vector<Value> context(width);
      for (VarIndex v = 0; v < width; ++v) context[v] = random_cell(rng, sig->variable(v));
      for (std::size_t s = 0; s < len; ++s) {
        for (VarIndex v = 0; v < width; ++v) {
          cells.push_back(sig->variable(v).endogenous() ? random_cell(rng, sig->variable(v))
                                                        : context[v]);
        }
      }
    }
    traces.push_back(std::make_shared<const Trace>("t" + std::to_string(k), width, std::move(cells)));
  }
  return TraceLog(sig, std::move(traces));
}

inline TimeIndex random_index(Rng& rng) {
  switch (rng.below(4)) {
    case 0: return TimeIndex::current();
    case 1: return TimeIndex::last();
    default: return TimeIndex::at(rng.below(4));
  }
}

inline Formula random_primitive(Rng& rng, const Signature& sig, bool step_only = false) {
  const VarIndex v = rng.below(sig.size());
  const VariableDecl& d = sig.variable(v);
  const TimeIndex idx = step_only ? TimeIndex::at(rng.below(4)) : random_index(rng);
  if (d.discrete()) {
    const Comparator cmp = rng.chance(0.5) ? Comparator::eq : Comparator::ne;
    return Formula::primitive(sig, d.name, idx, cmp, random_cell(rng, d));
  }
  const Comparator cmp = static_cast<Comparator>(rng.below(6));
  return Formula::primitive(sig, d.name, idx, cmp, random_cell(rng, d));
}

inline Formula random_formula(Rng& rng, const Signature& sig, int depth = 3) {
  if (depth == 0 || rng.chance(0.35)) return random_primitive(rng, sig);
  switch (rng.below(3)) {
    case 0: return Formula::negation(random_formula(rng, sig, depth - 1));
    case 1:
      return Formula::conjunction({random_formula(rng, sig, depth - 1),
                                   random_formula(rng, sig, depth - 1)});
    default:
      return Formula::disjunction({random_formula(rng, sig, depth - 1),
                                   random_formula(rng, sig, depth - 1)});
  }
}

// Conjunction of one or two `a(k) = v` events at distinct steps k < 4.
inline std::vector<PrimitiveEvent> random_cause_events(Rng& rng, const Signature& sig) {
  std::vector<PrimitiveEvent> out;
  const std::size_t n = 1 + rng.below(2);
  std::size_t first_step = 99;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t step = rng.below(4);
    if (step == first_step) continue;
    first_step = step;
    const Value v = Token{static_cast<std::int32_t>(rng.below(3))};
    out.push_back(Formula::primitive(sig, "a", TimeIndex::at(step), Comparator::eq, v).event());
  }
  return out;
}

}  // namespace fixtures
