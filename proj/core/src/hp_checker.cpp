#include "tracecause/hp_checker.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "tracecause/error.hpp"

namespace tracecause {

Partition derive_partition(const Signature& signature, const VarSet& cause_vars) {
  if (cause_vars.empty()) throw Error(Errc::invalid_argument, "cause variable set is empty");
  Partition p;
  p.x = cause_vars;
  std::sort(p.x.begin(), p.x.end());
  p.x.erase(std::unique(p.x.begin(), p.x.end()), p.x.end());
  for (VarIndex v : p.x) {
    if (v >= signature.size()) throw Error(Errc::unknown_variable, "variable index out of range");
    if (!signature.variable(v).endogenous()) {
      throw Error(Errc::invalid_argument,
                  "cause variable '" + signature.variable(v).name + "' is exogenous");
    }
  }
  for (VarIndex v : signature.reachable_from(p.x)) {
    if (signature.variable(v).endogenous()) p.z.push_back(v);
  }
  for (VarIndex v : signature.endogenous()) {
    if (!std::binary_search(p.z.begin(), p.z.end(), v)) p.w.push_back(v);
  }
  return p;
}

Partition derive_partition(const Signature& signature, const std::vector<std::string>& cause_vars) {
  return derive_partition(signature, signature.resolve(cause_vars));
}

CauseCandidate make_candidate(const Signature& signature, std::vector<PrimitiveEvent> conjuncts) {
  if (conjuncts.empty()) throw Error(Errc::invalid_argument, "a cause needs at least one event");
  VarSet vars;
  std::vector<Formula> ops;
  for (auto& e : conjuncts) {
    vars.push_back(e.var);
    ops.push_back(Formula::primitive(std::move(e)));
  }
  return CauseCandidate{Formula::conjunction(std::move(ops)), derive_partition(signature, vars)};
}

bool trace_equiv(const Trace& a, const Trace& b, const VarSet& vars, const Signature& signature,
                 std::optional<std::size_t> through) {
  if (vars.empty()) return true;
  std::size_t steps = 0;
  if (through) {
    if (a.size() <= *through || b.size() <= *through) return false;
    steps = *through + 1;
  } else {
    if (a.size() != b.size()) return false;
    steps = a.size();
  }
  for (VarIndex v : vars) {
    const VariableDecl& decl = signature.variable(v);
    for (std::size_t i = 0; i < steps; ++i) {
      if (!decl.equal(a.at(i, v), b.at(i, v))) return false;
    }
  }
  return true;
}

std::optional<std::size_t> equiv_horizon(const CauseCandidate& c, const CheckOptions& options) {
  if (!options.equiv_prefix) return std::nullopt;
  return c.formula.max_step_index();
}

bool same_context(const Trace& a, const Trace& b, const Signature& signature) {
  for (VarIndex v : signature.exogenous()) {
    if (!signature.variable(v).equal(a.at(0, v), b.at(0, v))) return false;
  }
  return true;
}

namespace {

bool defined(const Trace& t, const Formula& cause, const Formula& effect) {
  return is_defined_on(cause, t) && is_defined_on(effect, t);
}

}  // namespace

bool satisfies_ac1(const Trace& t, const Formula& cause, const Formula& effect) {
  if (!defined(t, cause, effect)) return false;
  const std::size_t n = t.size();
  std::vector<char> later_effect(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) {
    later_effect[i] = later_effect[i + 1] || eval_at(effect, t, i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (later_effect[i] && eval_at(cause, t, i)) return true;
    if (eval_at(effect, t, i)) return false;
  }
  return false;
}

bool satisfies_counterfactual(const Trace& t, const Formula& cause, const Formula& effect) {
  if (!defined(t, cause, effect)) return false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (eval_at(cause, t, i) || eval_at(effect, t, i)) return false;
  }
  return true;
}

bool satisfies_ac2b_premise(const Trace& t, const Formula& cause, const Formula& effect) {
  if (!defined(t, cause, effect)) return false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (eval_at(cause, t, i)) return true;
    if (eval_at(effect, t, i)) return false;
  }
  return false;
}

std::optional<std::size_t> check_ac1(const TraceLog& log, const CauseCandidate& c,
                                     const Formula& effect, std::size_t from) {
  for (std::size_t i = from; i < log.size(); ++i) {
    if (satisfies_ac1(log[i], c.formula, effect)) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> check_ac2a(const TraceLog& log, const Trace& tau,
                                      const CauseCandidate& c, const Formula& effect,
                                      const CheckOptions& options) {
  const Signature& sig = log.signature();
  const auto through = equiv_horizon(c, options);
  for (std::size_t i = 0; i < log.size(); ++i) {
    const Trace& t = log[i];
    if (options.same_context && !same_context(tau, t, sig)) continue;
    if (!satisfies_counterfactual(t, c.formula, effect)) continue;
    if (!trace_equiv(tau, t, c.partition.z, sig, through) ||
        !trace_equiv(tau, t, c.partition.w, sig, through)) {
      return i;
    }
  }
  return std::nullopt;
}

Ac2bResult check_ac2b(const TraceLog& log, const Trace& tau, const CauseCandidate& c,
                      const Formula& effect, const CheckOptions& options) {
  const Signature& sig = log.signature();
  const auto through = equiv_horizon(c, options);
  Ac2bResult result;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const Trace& t = log[i];
    ++result.examined;
    if (!trace_equiv(tau, t, c.partition.z, sig, through)) continue;
    if (!c.partition.w.empty() && trace_equiv(tau, t, c.partition.w, sig, through)) continue;
    if (!satisfies_ac2b_premise(t, c.formula, effect)) continue;
    if (!holds_eventually(effect, t)) {
      result.counterexample = i;
      return result;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Candidate enumeration

CandidateStream::CandidateStream(const TraceLog& log, const Formula& effect,
                                 const VarSet& cause_vars, std::size_t max_conjuncts)
    : log_(log), max_conjuncts_(std::max<std::size_t>(1, max_conjuncts)) {
  const Signature& sig = log.signature();
  vars_ = cause_vars;
  std::sort(vars_.begin(), vars_.end());
  vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
  for (VarIndex v : vars_) {
    if (v >= sig.size() || !sig.variable(v).endogenous()) {
      throw Error(Errc::invalid_argument, "cause variables must be endogenous");
    }
  }
  for (std::size_t i = 0; i < log.size(); ++i) {
    const Trace& t = log[i];
    if (!is_defined_on(effect, t) || !holds_eventually(effect, t)) continue;
    failing_.push_back(i);
    max_len_ = std::max(max_len_, t.size());
  }
}

bool CandidateStream::generate_step() {
  if (next_step_ >= max_len_) return false;
  const std::size_t step = next_step_++;
  const Signature& sig = log_.signature();
  std::map<std::pair<VarIndex, Value>, std::size_t> at_step;
  for (std::size_t ti : failing_) {
    const Trace& t = log_[ti];
    if (step >= t.size()) continue;
    for (VarIndex v : vars_) {
      const Value& value = t.at(step, v);
      auto [slot, fresh] = at_step.try_emplace({v, value}, singles_.size());
      if (fresh) {
        const VariableDecl& decl = sig.variable(v);
        Single s;
        s.event.var = v;
        s.event.var_name = decl.name;
        s.event.index = TimeIndex::at(step);
        s.event.cmp = Comparator::eq;
        s.event.value = value;
        s.event.value_text = decl.format(value);
        s.event.discrete = decl.discrete();
        s.event.tolerance = decl.tolerance;
        singles_.push_back(std::move(s));
      }
      auto& traces = singles_[slot->second].traces;
      if (max_conjuncts_ > 1 && (traces.empty() || traces.back() != ti)) traces.push_back(ti);
    }
  }
  return true;
}

std::size_t CandidateStream::singleton_count() {
  while (generate_step()) {
  }
  return singles_.size();
}

bool CandidateStream::combination_valid() const {
  std::set<std::pair<VarIndex, std::size_t>> seen;
  for (std::size_t i : combo_) {
    const auto& e = singles_[i].event;
    if (!seen.emplace(e.var, e.index.step()).second) return false;
  }
  if (combo_.size() == 1) return true;
  std::vector<std::size_t> common = singles_[combo_[0]].traces;
  for (std::size_t k = 1; k < combo_.size() && !common.empty(); ++k) {
    const auto& other = singles_[combo_[k]].traces;
    std::vector<std::size_t> next;
    std::set_intersection(common.begin(), common.end(), other.begin(), other.end(),
                          std::back_inserter(next));
    common = std::move(next);
  }
  return !common.empty();
}

bool CandidateStream::advance_combination() {
  if (combo_.empty()) {
    while (singles_.empty() && generate_step()) {
    }
    if (singles_.empty()) return false;
    combo_ = {0};
    return true;
  }
  if (combo_.size() == 1) {
    const std::size_t want = combo_[0] + 1;
    while (want >= singles_.size() && generate_step()) {
    }
    if (want < singles_.size()) {
      combo_[0] = want;
      return true;
    }
  }
  // Conjunctions need the whole singleton list.
  const std::size_t n = singleton_count();
  std::size_t k = combo_.size();
  if (k > 1) {
    for (std::size_t pos = k; pos-- > 0;) {
      if (combo_[pos] < n - (k - pos)) {
        ++combo_[pos];
        for (std::size_t j = pos + 1; j < k; ++j) combo_[j] = combo_[j - 1] + 1;
        return true;
      }
    }
  }
  if (k + 1 > max_conjuncts_ || k + 1 > n) return false;
  combo_.resize(k + 1);
  for (std::size_t j = 0; j <= k; ++j) combo_[j] = j;
  return true;
}

std::optional<CauseCandidate> CandidateStream::next() {
  while (!done_) {
    if (!advance_combination()) {
      done_ = true;
      break;
    }
    if (!combination_valid()) continue;
    std::vector<PrimitiveEvent> events;
    for (std::size_t i : combo_) events.push_back(singles_[i].event);
    return make_candidate(log_.signature(), std::move(events));
  }
  return std::nullopt;
}

std::vector<CauseCandidate> enumerate_candidates(const TraceLog& log, const Formula& effect,
                                                 const VarSet& cause_vars,
                                                 std::size_t max_conjuncts) {
  CandidateStream stream(log, effect, cause_vars, max_conjuncts);
  std::vector<CauseCandidate> out;
  while (auto c = stream.next()) out.push_back(std::move(*c));
  return out;
}

}  // namespace tracecause
