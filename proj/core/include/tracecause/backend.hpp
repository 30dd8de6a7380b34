#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string_view>

#include "tracecause/formula.hpp"
#include "tracecause/hp_checker.hpp"
#include "tracecause/trace_model.hpp"

namespace tracecause {

// Cooperative time budget; check() throws Errc::timeout once it has passed.
class Deadline {
 public:
  Deadline() = default;
  explicit Deadline(std::chrono::milliseconds budget)
      : end_(std::chrono::steady_clock::now() + budget) {}

  bool expired() const { return end_ && std::chrono::steady_clock::now() >= *end_; }
  void check() const;

 private:
  std::optional<std::chrono::steady_clock::time_point> end_;
};

// Positions are into the log passed to the call.
struct ExistentialResult {
  std::optional<std::size_t> witness;         // first AC1 trace
  std::optional<std::size_t> tau;             // first AC1 trace that has a counterfactual
  std::optional<std::size_t> counterfactual;  // first counterfactual for tau

  bool sat() const { return tau.has_value(); }
};

// Answers the HP conditions over a finite set of traces.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string_view name() const = 0;

  // AC1 and AC2(a) jointly: witnesses tried in log order, each paired with
  // its first counterfactual.
  virtual ExistentialResult solve_existential(const TraceLog& log, const CauseCandidate& c,
                                              const Formula& effect,
                                              const CheckOptions& options,
                                              const Deadline& deadline) = 0;

  // AC2(b) for witness `tau`.
  virtual Ac2bResult check_universal(const TraceLog& log, const Trace& tau,
                                     const CauseCandidate& c, const Formula& effect,
                                     const CheckOptions& options, const Deadline& deadline) = 0;
};

// Scans traces one at a time through the hp_checker predicates.
std::unique_ptr<Backend> make_direct_backend();

// Tabulates the cause and effect truth values of every (trace, step) first,
// derives the temporal conditions from those columns, then joins the
// filtered witness and counterfactual sets.
std::unique_ptr<Backend> make_columnar_backend();

}  // namespace tracecause
