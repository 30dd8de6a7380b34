#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "tracecause/formula.hpp"
#include "tracecause/hp_checker.hpp"
#include "tracecause/trace_model.hpp"

namespace tracecause {

// Seeded subset of a log used for the existential conditions.
struct UnderApprox {
  TraceLog selected;
  // Positions in the full log, ascending; selected[i] is full[indices[i]].
  std::vector<std::size_t> indices;
  double alpha = 1.0;
  std::uint64_t seed = 0;
};

// max(1, ceil(alpha * n))
std::size_t sample_size(std::size_t n, double alpha);

// Shuffles trace positions with the seeded generator and keeps the first
// sample_size(N, alpha), restored to log order. Throws Errc::empty_log or
// Errc::invalid_argument for alpha outside (0, 1].
UnderApprox under_approximate(const TraceLog& log, double alpha, std::uint64_t seed);

// Doubles alpha (capped at 1) and extends the selection along the same
// shuffled order. Throws Errc::exhausted when alpha is already 1.
UnderApprox refine_under(const UnderApprox& u, const TraceLog& full);

struct StateRef {
  std::uint32_t trace = 0;
  std::uint32_t step = 0;

  friend bool operator==(const StateRef&, const StateRef&) = default;
};

struct AbstractState {
  std::size_t id = 0;
  std::size_t step = 0;
  // Centroid of continuous values; discrete values of the first member.
  State representative;
  // Per-variable value range over the members; token indices for discrete.
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<StateRef> members;
  bool defined = true;
  bool cause = false;
  bool effect = false;
};

// Merged model of a full log. Every concrete (trace, step) maps to exactly one
// abstract state; members of one state share the step, the cause and effect
// truth values, every discrete value in Z and X, and one grid cell of side
// beta (in domain-normalized units) on every continuous Z variable. beta = 0
// keys on every exact value instead.
class AbstractModel {
 public:
  const TraceLog& log() const { return log_; }
  const CauseCandidate& candidate() const { return candidate_; }
  const Formula& effect() const { return effect_; }
  double beta() const { return beta_; }

  std::size_t size() const { return states_.size(); }
  const AbstractState& state(std::size_t id) const { return states_.at(id); }
  const std::vector<AbstractState>& states() const { return states_; }

  // h(trace, step)
  std::size_t state_of(std::size_t trace, std::size_t step) const {
    return abstract_traces_[trace][step];
  }
  const std::vector<std::size_t>& abstract_trace(std::size_t trace) const {
    return abstract_traces_.at(trace);
  }
  std::size_t concrete_state_count() const { return concrete_states_; }

  // Replaces each listed state having more than one member by singletons.
  // Returns the number of states added.
  std::size_t split(const std::vector<std::size_t>& ids);

 private:
  friend AbstractModel over_approximate(const TraceLog&, double, const CauseCandidate&,
                                        const Formula&);
  AbstractModel(TraceLog log, CauseCandidate candidate, Formula effect, double beta)
      : log_(std::move(log)), candidate_(std::move(candidate)), effect_(std::move(effect)),
        beta_(beta) {}
  void summarize(AbstractState& s) const;

  TraceLog log_;
  CauseCandidate candidate_;
  Formula effect_;
  double beta_;
  std::vector<AbstractState> states_;
  std::vector<std::vector<std::size_t>> abstract_traces_;
  std::size_t concrete_states_ = 0;
};

// Grid cell of a continuous value for side length beta; cells of beta and of
// any integer multiple of it nest exactly.
std::int64_t grid_cell(double value, const ContinuousDomain& domain, double beta);

// Throws Errc::invalid_argument for negative or non-finite beta.
AbstractModel over_approximate(const TraceLog& log, double beta, const CauseCandidate& candidate,
                               const Formula& effect);

// Image of the cause's intervention X <- x: for each conjunct `v(k) = x`, the
// abstract states at step k holding some concrete state with v = x. It is
// defined (Y = X maps onto it) when none of those states also holds a
// concrete state with v != x.
struct InterventionMap {
  bool defined = true;
  std::vector<std::size_t> image;
  std::vector<std::size_t> mixed;
};

InterventionMap map_intervention(const AbstractModel& m);

// A group of concrete traces sharing one abstract trace.
struct AbstractCounterexample {
  std::vector<std::size_t> states;
  std::vector<std::size_t> concretization;  // full-log trace positions, ascending
};

struct AbstractAc2bResult {
  std::optional<AbstractCounterexample> counterexample;
  std::size_t examined = 0;  // abstract traces checked

  bool ok() const { return !counterexample; }
};

// AC2(b) against the abstract image of witness `tau` (a full-log position).
// Z-equivalence is over-approximated by range overlap and W-difference by
// "not certainly equal", so every concrete violation shows up here.
AbstractAc2bResult check_ac2b_abstract(const AbstractModel& m, std::size_t tau,
                                       const CheckOptions& options = {});

// First concrete trace in the counterexample's concretization that violates
// AC2(b) for `tau`; none means the counterexample is spurious.
std::optional<std::size_t> concretize(const AbstractModel& m, std::size_t tau,
                                      const AbstractCounterexample& cex,
                                      const CheckOptions& options = {});

// Splits every multi-member state on the counterexample's abstract trace;
// when there is none, splits along the witness's image instead. Throws
// Errc::no_split when neither has a multi-member state.
AbstractModel refine_over(AbstractModel m, const AbstractCounterexample& cex,
                          std::size_t tau);

}  // namespace tracecause
