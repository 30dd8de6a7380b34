#pragma once

// Brute-force reference implementations. These deliberately avoid the
// library's temporal operators and HP checks: quantifiers are expanded as
// plain index loops over raw trace values, and only state-level truth comes
// from eval_at.

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <set>
#include <vector>

#include "tracecause/formula.hpp"
#include "tracecause/hp_checker.hpp"
#include "tracecause/trace_model.hpp"

namespace oracle {

using namespace tracecause;

inline bool truth(const Formula& f, const Trace& t, std::size_t i) { return eval_at(f, t, i); }

inline bool always(const Formula& f, const Trace& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!truth(f, t, i)) return false;
  }
  return true;
}

inline bool eventually(const Formula& f, const Trace& t, std::size_t from = 0) {
  for (std::size_t i = from; i < t.size(); ++i) {
    if (truth(f, t, i)) return true;
  }
  return false;
}

// exists i. q(i) and forall j < i. p(j)
inline bool until(const Formula& p, const Formula& q, const Trace& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!truth(q, t, i)) continue;
    bool prefix = true;
    for (std::size_t j = 0; j < i; ++j) prefix = prefix && truth(p, t, j);
    if (prefix) return true;
  }
  return false;
}

inline bool defined_on(const Formula& f, const Trace& t) {
  for (const auto& e : f.primitives()) {
    if (e.index.kind() == TimeIndex::Kind::step && e.index.step() >= t.size()) return false;
  }
  return true;
}

inline bool values_agree(const VariableDecl& d, const Value& a, const Value& b) {
  if (d.discrete()) return std::get<Token>(a) == std::get<Token>(b);
  return std::fabs(std::get<double>(a) - std::get<double>(b)) <= d.tolerance;
}

inline bool equiv(const Trace& a, const Trace& b, const VarSet& vars, const Signature& sig,
                  std::optional<std::size_t> through = std::nullopt) {
  if (vars.empty()) return true;
  std::size_t steps;
  if (through) {
    if (a.size() <= *through || b.size() <= *through) return false;
    steps = *through + 1;
  } else {
    if (a.size() != b.size()) return false;
    steps = a.size();
  }
  for (std::size_t i = 0; i < steps; ++i) {
    for (VarIndex v : vars) {
      if (!values_agree(sig.variable(v), a.at(i, v), b.at(i, v))) return false;
    }
  }
  return true;
}

inline bool context_agrees(const Trace& a, const Trace& b, const Signature& sig) {
  for (VarIndex v = 0; v < sig.size(); ++v) {
    if (sig.variable(v).endogenous()) continue;
    if (!values_agree(sig.variable(v), a.at(0, v), b.at(0, v))) return false;
  }
  return true;
}

// Z by breadth-first search over the declared edge names.
inline Partition partition(const Signature& sig, const std::vector<std::string>& causes) {
  std::set<std::string> reached(causes.begin(), causes.end());
  std::deque<std::string> queue(causes.begin(), causes.end());
  while (!queue.empty()) {
    const std::string at = queue.front();
    queue.pop_front();
    std::vector<Edge> edges = sig.transition_edges();
    edges.insert(edges.end(), sig.instant_edges().begin(), sig.instant_edges().end());
    for (const Edge& e : edges) {
      if (e.parent == at && reached.insert(e.child).second) queue.push_back(e.child);
    }
  }
  Partition p;
  for (VarIndex v = 0; v < sig.size(); ++v) {
    const auto& d = sig.variable(v);
    if (!d.endogenous()) continue;
    const bool in_x = std::find(causes.begin(), causes.end(), d.name) != causes.end();
    if (in_x) p.x.push_back(v);
    (reached.count(d.name) ? p.z : p.w).push_back(v);
  }
  return p;
}

// The three conditions with every quantifier expanded.

inline std::optional<std::size_t> ac1(const TraceLog& log, const Formula& c, const Formula& e) {
  for (std::size_t k = 0; k < log.size(); ++k) {
    const Trace& t = log[k];
    if (!defined_on(c, t) || !defined_on(e, t)) continue;
    for (std::size_t i = 0; i < t.size(); ++i) {
      bool before = true;
      for (std::size_t j = 0; j < i; ++j) before = before && !truth(e, t, j);
      if (before && truth(c, t, i) && eventually(e, t, i)) return k;
    }
  }
  return std::nullopt;
}

inline std::optional<std::size_t> ac2a(const TraceLog& log, const Trace& tau, const Formula& c,
                                       const Formula& e, const Partition& p, bool same_context,
                                       std::optional<std::size_t> through = std::nullopt) {
  const Signature& sig = log.signature();
  for (std::size_t k = 0; k < log.size(); ++k) {
    const Trace& t = log[k];
    if (!defined_on(c, t) || !defined_on(e, t)) continue;
    bool never = true;
    for (std::size_t i = 0; i < t.size(); ++i) never = never && !truth(c, t, i) && !truth(e, t, i);
    if (!never) continue;
    if (same_context && !context_agrees(tau, t, sig)) continue;
    if (!equiv(tau, t, p.z, sig, through) || !equiv(tau, t, p.w, sig, through)) return k;
  }
  return std::nullopt;
}

inline std::optional<std::size_t> ac2b(const TraceLog& log, const Trace& tau, const Formula& c,
                                       const Formula& e, const Partition& p,
                                       std::optional<std::size_t> through = std::nullopt) {
  const Signature& sig = log.signature();
  for (std::size_t k = 0; k < log.size(); ++k) {
    const Trace& t = log[k];
    if (!defined_on(c, t) || !defined_on(e, t)) continue;
    bool premise = false;
    for (std::size_t i = 0; i < t.size() && !premise; ++i) {
      bool before = true;
      for (std::size_t j = 0; j < i; ++j) before = before && !truth(e, t, j);
      premise = before && truth(c, t, i);
    }
    const bool z_same = equiv(tau, t, p.z, sig, through);
    const bool w_differs = p.w.empty() || !equiv(tau, t, p.w, sig, through);
    if (premise && z_same && w_differs && !eventually(e, t)) return k;
  }
  return std::nullopt;
}

}  // namespace oracle
