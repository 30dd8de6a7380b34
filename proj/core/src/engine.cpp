#include "tracecause/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "tracecause/abstraction.hpp"
#include "tracecause/backend.hpp"
#include "tracecause/error.hpp"

namespace tracecause {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::direct_full: return "direct_full";
    case Mode::direct_abs: return "direct_abs";
    case Mode::backend_full: return "backend_full";
    case Mode::backend_abs: return "backend_abs";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  for (Mode m : {Mode::direct_full, Mode::direct_abs, Mode::backend_full, Mode::backend_abs}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

bool uses_abstraction(Mode mode) { return mode == Mode::direct_abs || mode == Mode::backend_abs; }

std::string_view to_string(NoCauseReason reason) {
  switch (reason) {
    case NoCauseReason::ac1_unsat: return "ac1-unsat";
    case NoCauseReason::ac2a_unsat: return "ac2a-unsat";
    case NoCauseReason::ac2b_cex: return "ac2b-cex";
    case NoCauseReason::caps: return "caps";
    case NoCauseReason::timeout: return "timeout";
  }
  return "?";
}

std::string_view Verification::failing() const {
  if (!ac1) return "ac1";
  if (!ac2a) return "ac2a";
  if (!ac2b) return "ac2b";
  return "";
}

void validate(const EngineConfig& cfg, const Signature& signature) {
  if (!(cfg.alpha0 > 0.0 && cfg.alpha0 <= 1.0)) {
    throw Error(Errc::invalid_argument, "alpha must lie in (0, 1]");
  }
  if (!(cfg.beta >= 0.0) || !std::isfinite(cfg.beta)) {
    throw Error(Errc::invalid_argument, "beta must be a finite value >= 0");
  }
  if (cfg.max_outer_iters < 1) throw Error(Errc::invalid_argument, "max outer iterations must be >= 1");
  if (cfg.max_conjuncts < 1) throw Error(Errc::invalid_argument, "max conjuncts must be >= 1");
  if (cfg.cause_vars.empty()) throw Error(Errc::invalid_argument, "no cause variables given");
  for (VarIndex v : cfg.cause_vars) {
    if (v >= signature.size()) throw Error(Errc::unknown_variable, "cause variable index out of range");
    if (!signature.variable(v).endogenous()) {
      throw Error(Errc::invalid_argument,
                  "cause variable '" + signature.variable(v).name + "' is exogenous");
    }
  }
  if (cfg.timeout && cfg.timeout->count() < 0) {
    throw Error(Errc::invalid_argument, "timeout must be >= 0");
  }
}

Verification verify_cause(const TraceLog& log, const CauseCandidate& cause, const Formula& effect,
                          const CheckOptions& options) {
  Verification v;
  for (std::size_t from = 0; from < log.size();) {
    auto tau = check_ac1(log, cause, effect, from);
    if (!tau) break;
    if (!v.ac1) {
      v.ac1 = true;
      v.witness = tau;
    }
    from = *tau + 1;
    auto cf = check_ac2a(log, log[*tau], cause, effect, options);
    if (!cf) continue;
    if (!v.ac2a) {
      v.ac2a = true;
      v.witness = tau;
      v.counterfactual = cf;
    }
    auto r = check_ac2b(log, log[*tau], cause, effect, options);
    if (r.ok()) {
      v.ac2b = true;
      v.witness = tau;
      v.counterfactual = cf;
      v.counterexample.reset();
      return v;
    }
    if (!v.counterexample) v.counterexample = r.counterexample;
  }
  return v;
}

namespace {

enum class Universal { holds, violated, capped };

class Search {
 public:
  Search(const TraceLog& log, const Formula& effect, const EngineConfig& cfg, CauseReport& report)
      : log_(log), effect_(effect), cfg_(cfg), report_(report),
        backend_(cfg.mode == Mode::backend_full || cfg.mode == Mode::backend_abs
                     ? make_columnar_backend()
                     : make_direct_backend()),
        deadline_(cfg.timeout ? Deadline(*cfg.timeout) : Deadline()),
        stream_(log, effect, cfg.cause_vars, cfg.max_conjuncts) {
    max_inner_ = cfg.max_inner_iters;
    if (max_inner_ == 0) {
      for (std::size_t i = 0; i < log.size(); ++i) max_inner_ += log[i].size();
    }
  }

  void run() {
    EngineStats& st = report_.stats;
    const bool abs = uses_abstraction(cfg_.mode);
    UnderApprox u = abs ? under_approximate(log_, cfg_.alpha0, cfg_.seed) : whole_log();

    int progress = 0;  // furthest condition any candidate reached
    bool capped = false;
    for (;;) {
      ++st.outer_iters;
      st.alpha_final = u.alpha;
      st.selected_traces = u.selected.size();

      for (std::size_t k = 0;; ++k) {
        if (k == candidates_.size()) {
          auto next = stream_.next();
          if (!next) break;
          candidates_.push_back(std::move(*next));
        }
        const CauseCandidate* cand = &candidates_[k];
        deadline_.check();
        ++st.candidates_tried;
        const auto ex = backend_->solve_existential(u.selected, *cand, effect_, cfg_.check,
                                                    deadline_);
        if (ex.witness) progress = std::max(progress, 1);
        if (!ex.sat()) continue;
        progress = std::max(progress, 2);
        const std::size_t tau = u.indices[*ex.tau];
        const std::size_t cf = u.indices[*ex.counterfactual];

        const Universal verdict = abs ? universal_abstract(*cand, tau) : universal_full(*cand, tau);
        if (verdict == Universal::capped) {
          capped = true;
          break;
        }
        if (verdict == Universal::violated) {
          progress = 3;
          continue;
        }
        report_.cause = *cand;
        report_.witness = log_[tau].id();
        report_.counterfactual = log_[cf].id();
        return;
      }
      if (capped || !abs || u.alpha >= 1.0) break;
      if (st.outer_iters >= cfg_.max_outer_iters) {
        capped = true;
        break;
      }
      u = refine_under(u, log_);
    }
    if (capped) {
      report_.reason = NoCauseReason::caps;
    } else {
      report_.reason = progress == 0   ? NoCauseReason::ac1_unsat
                       : progress == 1 ? NoCauseReason::ac2a_unsat
                                       : NoCauseReason::ac2b_cex;
    }
  }

 private:
  UnderApprox whole_log() const {
    std::vector<std::size_t> all(log_.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return UnderApprox{log_, std::move(all), 1.0, cfg_.seed};
  }

  Universal universal_full(const CauseCandidate& cand, std::size_t tau) {
    const auto r = backend_->check_universal(log_, log_[tau], cand, effect_, cfg_.check, deadline_);
    report_.stats.checked_universe += r.examined;
    return r.ok() ? Universal::holds : Universal::violated;
  }

  Universal universal_abstract(const CauseCandidate& cand, std::size_t tau) {
    EngineStats& st = report_.stats;
    AbstractModel m = over_approximate(log_, cfg_.beta, cand, effect_);
    st.abstract_state_history.push_back(m.size());
    std::size_t inner = 0;

    const auto iv = map_intervention(m);
    if (!iv.defined) {
      m.split(iv.mixed);
      ++inner;
      ++st.inner_iters;
      st.abstract_state_history.push_back(m.size());
    }
    for (;;) {
      deadline_.check();
      const auto r = check_ac2b_abstract(m, tau, cfg_.check);
      st.checked_universe += r.examined;
      st.abstract_states = m.size();
      if (r.ok()) return Universal::holds;
      if (genuine(m, tau, *r.counterexample)) return Universal::violated;
      if (inner >= max_inner_) return Universal::capped;
      m = refine_over(std::move(m), *r.counterexample, tau);
      ++inner;
      ++st.inner_iters;
      st.abstract_state_history.push_back(m.size());
      st.abstract_states = m.size();
    }
  }

  bool genuine(const AbstractModel& m, std::size_t tau, const AbstractCounterexample& cex) {
    if (cfg_.mode == Mode::backend_abs) {
      const TraceLog group = log_.subset(cex.concretization);
      return !backend_->check_universal(group, log_[tau], m.candidate(), effect_, cfg_.check,
                                        deadline_)
                  .ok();
    }
    return concretize(m, tau, cex, cfg_.check).has_value();
  }

  const TraceLog& log_;
  const Formula& effect_;
  const EngineConfig& cfg_;
  CauseReport& report_;
  std::unique_ptr<Backend> backend_;
  Deadline deadline_;
  // The hypothesis space comes from the full log, so every mode tries
  // candidates in the same order.
  CandidateStream stream_;
  std::vector<CauseCandidate> candidates_;
  std::size_t max_inner_ = 0;
};

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

CauseReport find_actual_cause(const TraceLog& log, const Formula& effect, const EngineConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  validate(cfg, log.signature());
  if (log.empty()) throw Error(Errc::empty_log, "the log has no traces");

  CauseReport report;
  report.mode = cfg.mode;
  try {
    Search(log, effect, cfg, report).run();
  } catch (const Error& e) {
    if (e.code() != Errc::timeout) throw;
    report.cause.reset();
    report.witness.clear();
    report.counterfactual.clear();
    report.reason = NoCauseReason::timeout;
  }
  report.stats.wall_ms = elapsed_ms(start);
  if (report.found() && cfg.verify) {
    report.verification = verify_cause(log, *report.cause, effect, cfg.check);
  }
  return report;
}

namespace {

BenchRow bench_one(const TraceLog& log, const Formula& effect, EngineConfig cfg,
                   std::size_t repeats) {
  cfg.verify = false;
  BenchRow row;
  row.size = log.size();
  row.mode = cfg.mode;
  row.alpha = uses_abstraction(cfg.mode) ? cfg.alpha0 : 1.0;
  std::vector<double> times;
  for (std::size_t k = 0; k < std::max<std::size_t>(1, repeats); ++k) {
    const CauseReport r = find_actual_cause(log, effect, cfg);
    times.push_back(r.stats.wall_ms);
    row.outer_refinements = r.stats.outer_iters > 0 ? r.stats.outer_iters - 1 : 0;
    row.inner_refinements = r.stats.inner_iters;
    row.outcome = r.found() ? r.cause->to_string() : std::string(to_string(*r.reason));
  }
  std::sort(times.begin(), times.end());
  row.wall_ms = times[times.size() / 2];
  return row;
}

}  // namespace

std::vector<BenchRow> bench_modes(const TraceLog& log, const Formula& effect,
                                  const EngineConfig& cfg, const std::vector<std::size_t>& sizes,
                                  const std::vector<Mode>& modes, std::size_t repeats) {
  for (std::size_t n : sizes) {
    if (n == 0 || n > log.size()) {
      throw Error(Errc::invalid_argument, "bench size " + std::to_string(n) +
                                              " is outside 1.." + std::to_string(log.size()));
    }
  }
  std::vector<BenchRow> rows;
  for (std::size_t n : sizes) {
    const TraceLog prefix = log.prefix(n);
    for (Mode mode : modes) {
      EngineConfig c = cfg;
      c.mode = mode;
      rows.push_back(bench_one(prefix, effect, c, repeats));
    }
  }
  return rows;
}

std::vector<BenchRow> bench_alphas(const TraceLog& log, const Formula& effect,
                                   const EngineConfig& cfg, const std::vector<double>& alphas,
                                   std::size_t repeats) {
  std::vector<BenchRow> rows;
  for (double a : alphas) {
    EngineConfig c = cfg;
    c.alpha0 = a;
    rows.push_back(bench_one(log, effect, c, repeats));
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "size,mode,alpha,wall_ms,refinements,outer_refinements,inner_refinements,outcome\n";
  for (const auto& r : rows) {
    out << r.size << ',' << to_string(r.mode) << ',' << format_real(r.alpha) << ','
        << format_real(std::round(r.wall_ms * 1000.0) / 1000.0) << ','
        << (r.outer_refinements + r.inner_refinements) << ',' << r.outer_refinements << ','
        << r.inner_refinements << ',';
    if (r.outcome.find_first_of(",\"") != std::string::npos) {
      out << '"';
      for (char ch : r.outcome) out << (ch == '"' ? "\"\"" : std::string(1, ch));
      out << '"';
    } else {
      out << r.outcome;
    }
    out << '\n';
  }
}

}  // namespace tracecause
