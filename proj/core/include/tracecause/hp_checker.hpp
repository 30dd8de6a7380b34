#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tracecause/formula.hpp"
#include "tracecause/trace_model.hpp"

namespace tracecause {

// X: cause variables; Z: X and everything downstream of it; W: the rest of
// the endogenous variables.
struct Partition {
  VarSet x;
  VarSet z;
  VarSet w;
};

// Throws Errc::unknown_variable, or Errc::invalid_argument for an empty or
// exogenous cause set.
Partition derive_partition(const Signature& signature, const VarSet& cause_vars);
Partition derive_partition(const Signature& signature, const std::vector<std::string>& cause_vars);

// A conjunction of `var(k) = value` events over the variables in partition.x.
struct CauseCandidate {
  Formula formula;
  Partition partition;

  std::string to_string() const { return formula.to_string(); }
};

// Builds the candidate for `conjuncts`, partitioning around their variables.
CauseCandidate make_candidate(const Signature& signature, std::vector<PrimitiveEvent> conjuncts);

struct CheckOptions {
  // Counterfactual traces must share the witness's exogenous values.
  bool same_context = true;
  // Compare traces only through the last step the cause mentions.
  bool equiv_prefix = false;
};

// Stepwise agreement on `vars`. Without `through`, lengths must match and all
// steps are compared; with it, steps 0..*through are compared and both traces
// must reach that step. Empty `vars` compares nothing.
bool trace_equiv(const Trace& a, const Trace& b, const VarSet& vars, const Signature& signature,
                 std::optional<std::size_t> through = std::nullopt);

// Last compared step under `options`, if comparison is truncated.
std::optional<std::size_t> equiv_horizon(const CauseCandidate& c, const CheckOptions& options);

bool same_context(const Trace& a, const Trace& b, const Signature& signature);

// Single-trace building blocks. Each is false on a trace where one of the
// formulas refers past its end.
// !e U (c & <>e), with <>e read from the anchor step onwards.
bool satisfies_ac1(const Trace& t, const Formula& cause, const Formula& effect);
// [](!c & !e)
bool satisfies_counterfactual(const Trace& t, const Formula& cause, const Formula& effect);
// !e U c
bool satisfies_ac2b_premise(const Trace& t, const Formula& cause, const Formula& effect);

// Index of the first trace, at or after `from`, satisfying AC1.
std::optional<std::size_t> check_ac1(const TraceLog& log, const CauseCandidate& c,
                                     const Formula& effect, std::size_t from = 0);

// Index of the first counterfactual trace for witness `tau`.
std::optional<std::size_t> check_ac2a(const TraceLog& log, const Trace& tau,
                                      const CauseCandidate& c, const Formula& effect,
                                      const CheckOptions& options = {});

struct Ac2bResult {
  std::optional<std::size_t> counterexample;
  std::size_t examined = 0;

  bool ok() const { return !counterexample; }
};

// First trace Z-equivalent to `tau` (and W-different when W is non-empty)
// satisfying !e U c but never e.
Ac2bResult check_ac2b(const TraceLog& log, const Trace& tau, const CauseCandidate& c,
                      const Formula& effect, const CheckOptions& options = {});

// Lazily enumerates cause hypotheses: singletons `v(t) = x` for values x seen
// at step t of a failing trace, ordered by t then by first observation; then
// conjunctions of up to `max_conjuncts` events over distinct (v, t) that
// co-occur in one failing trace.
class CandidateStream {
 public:
  CandidateStream(const TraceLog& log, const Formula& effect, const VarSet& cause_vars,
                  std::size_t max_conjuncts = 1);

  std::optional<CauseCandidate> next();
  // Forces the full singleton list.
  std::size_t singleton_count();
  std::size_t failing_count() const { return failing_.size(); }

 private:
  struct Single {
    PrimitiveEvent event;
    std::vector<std::size_t> traces;  // failing traces where it holds, ascending
  };
  // Appends the singletons of the next step; false when none remain.
  bool generate_step();
  bool advance_combination();
  bool combination_valid() const;

  TraceLog log_;
  VarSet vars_;
  std::vector<std::size_t> failing_;
  std::size_t max_len_ = 0;
  std::size_t next_step_ = 0;
  std::vector<Single> singles_;
  std::size_t max_conjuncts_;
  std::vector<std::size_t> combo_;
  bool done_ = false;
};

std::vector<CauseCandidate> enumerate_candidates(const TraceLog& log, const Formula& effect,
                                                 const VarSet& cause_vars,
                                                 std::size_t max_conjuncts = 1);

}  // namespace tracecause
