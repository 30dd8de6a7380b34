#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracecause/formula.hpp"
#include "tracecause/hp_checker.hpp"
#include "tracecause/trace_model.hpp"

namespace tracecause {

// direct/backend picks how the HP conditions are answered; full/abs picks
// whether the subset sampling and merged model are used.
enum class Mode { direct_full, direct_abs, backend_full, backend_abs };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);
bool uses_abstraction(Mode mode);

struct EngineConfig {
  Mode mode = Mode::direct_abs;
  double alpha0 = 0.1;
  double beta = 0.05;
  std::uint64_t seed = 0;
  std::size_t max_outer_iters = 16;
  // 0: the number of concrete states in the log.
  std::size_t max_inner_iters = 0;
  VarSet cause_vars;
  std::size_t max_conjuncts = 1;
  CheckOptions check;
  std::optional<std::chrono::milliseconds> timeout;
  // Re-check a found cause on the full log and store the result in the report.
  bool verify = true;
};

// Throws Errc::invalid_argument.
void validate(const EngineConfig& cfg, const Signature& signature);

enum class NoCauseReason { ac1_unsat, ac2a_unsat, ac2b_cex, caps, timeout };

std::string_view to_string(NoCauseReason reason);

struct Verification {
  bool ac1 = false;
  bool ac2a = false;
  bool ac2b = false;
  // Full-log positions of the traces that discharged each condition.
  std::optional<std::size_t> witness;
  std::optional<std::size_t> counterfactual;
  std::optional<std::size_t> counterexample;

  bool ok() const { return ac1 && ac2a && ac2b; }
  // First condition that fails, or "" when all hold.
  std::string_view failing() const;
};

struct EngineStats {
  std::size_t outer_iters = 0;  // rounds over trace subsets
  std::size_t inner_iters = 0;  // merged-model refinements
  std::size_t candidates_tried = 0;
  double alpha_final = 1.0;
  std::size_t selected_traces = 0;
  std::size_t abstract_states = 0;
  std::vector<std::size_t> abstract_state_history;
  std::size_t checked_universe = 0;
  double wall_ms = 0.0;

  std::size_t refinements() const {
    return (outer_iters > 0 ? outer_iters - 1 : 0) + inner_iters;
  }
};

struct CauseReport {
  Mode mode = Mode::direct_full;
  std::optional<CauseCandidate> cause;
  std::string witness;         // trace id
  std::string counterfactual;  // trace id
  std::optional<NoCauseReason> reason;
  EngineStats stats;
  std::optional<Verification> verification;

  bool found() const { return cause.has_value(); }
};

CauseReport find_actual_cause(const TraceLog& log, const Formula& effect, const EngineConfig& cfg);

// Searches the full log for a witness under which all three conditions hold.
// Each flag records whether some witness got that far.
Verification verify_cause(const TraceLog& log, const CauseCandidate& cause, const Formula& effect,
                          const CheckOptions& options = {});

struct BenchRow {
  std::size_t size = 0;
  Mode mode = Mode::direct_full;
  double alpha = 0.0;
  double wall_ms = 0.0;
  std::size_t outer_refinements = 0;
  std::size_t inner_refinements = 0;
  // Cause formula, a no-cause reason, or "timeout".
  std::string outcome;
};

// One row per (size, mode); each size is a prefix of the log. Wall time is
// the median over `repeats` runs.
std::vector<BenchRow> bench_modes(const TraceLog& log, const Formula& effect,
                                  const EngineConfig& cfg, const std::vector<std::size_t>& sizes,
                                  const std::vector<Mode>& modes, std::size_t repeats = 1);

// One row per alpha0, on the whole log with cfg.mode.
std::vector<BenchRow> bench_alphas(const TraceLog& log, const Formula& effect,
                                   const EngineConfig& cfg, const std::vector<double>& alphas,
                                   std::size_t repeats = 1);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace tracecause
