#include "tracecause/backend.hpp"

#include <vector>

#include "tracecause/error.hpp"

namespace tracecause {

void Deadline::check() const {
  if (expired()) throw Error(Errc::timeout, "time budget exhausted");
}

namespace {

class DirectBackend final : public Backend {
 public:
  std::string_view name() const override { return "direct"; }

  ExistentialResult solve_existential(const TraceLog& log, const CauseCandidate& c,
                                      const Formula& effect, const CheckOptions& options,
                                      const Deadline& deadline) override {
    ExistentialResult r;
    for (std::size_t from = 0; from < log.size();) {
      deadline.check();
      auto tau = check_ac1(log, c, effect, from);
      if (!tau) break;
      if (!r.witness) r.witness = tau;
      if (auto cf = check_ac2a(log, log[*tau], c, effect, options)) {
        r.tau = tau;
        r.counterfactual = cf;
        break;
      }
      from = *tau + 1;
    }
    return r;
  }

  Ac2bResult check_universal(const TraceLog& log, const Trace& tau, const CauseCandidate& c,
                             const Formula& effect, const CheckOptions& options,
                             const Deadline& deadline) override {
    deadline.check();
    return check_ac2b(log, tau, c, effect, options);
  }
};

// Per-trace summary of the cause/effect columns.
struct Row {
  bool defined = false;
  bool ac1 = false;             // !e U (c & <>e)
  bool counterfactual = false;  // [](!c & !e)
  bool premise = false;         // !e U c
  bool eventually = false;      // <>e
};

class ColumnarBackend final : public Backend {
 public:
  std::string_view name() const override { return "columnar"; }

  ExistentialResult solve_existential(const TraceLog& log, const CauseCandidate& c,
                                      const Formula& effect, const CheckOptions& options,
                                      const Deadline& deadline) override {
    const auto rows = tabulate(log, c, effect, deadline);
    std::vector<std::size_t> witnesses;
    std::vector<std::size_t> counterfactuals;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].ac1) witnesses.push_back(i);
      if (rows[i].counterfactual) counterfactuals.push_back(i);
    }
    const Signature& sig = log.signature();
    const auto through = equiv_horizon(c, options);
    ExistentialResult r;
    if (!witnesses.empty()) r.witness = witnesses.front();
    for (std::size_t w : witnesses) {
      deadline.check();
      const Trace& tau = log[w];
      for (std::size_t k : counterfactuals) {
        const Trace& t = log[k];
        if (options.same_context && !same_context(tau, t, sig)) continue;
        if (!trace_equiv(tau, t, c.partition.z, sig, through) ||
            !trace_equiv(tau, t, c.partition.w, sig, through)) {
          r.tau = w;
          r.counterfactual = k;
          return r;
        }
      }
    }
    return r;
  }

  Ac2bResult check_universal(const TraceLog& log, const Trace& tau, const CauseCandidate& c,
                             const Formula& effect, const CheckOptions& options,
                             const Deadline& deadline) override {
    const auto rows = tabulate(log, c, effect, deadline);
    const Signature& sig = log.signature();
    const auto through = equiv_horizon(c, options);
    Ac2bResult r;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ++r.examined;
      if (!rows[i].premise || rows[i].eventually) continue;
      const Trace& t = log[i];
      if (!trace_equiv(tau, t, c.partition.z, sig, through)) continue;
      if (!c.partition.w.empty() && trace_equiv(tau, t, c.partition.w, sig, through)) continue;
      r.counterexample = i;
      return r;
    }
    return r;
  }

 private:
  static std::vector<Row> tabulate(const TraceLog& log, const CauseCandidate& c,
                                   const Formula& effect, const Deadline& deadline) {
    std::vector<Row> rows(log.size());
    std::vector<char> cause_col;
    std::vector<char> effect_col;
    for (std::size_t i = 0; i < log.size(); ++i) {
      if ((i & 255) == 0) deadline.check();
      const Trace& t = log[i];
      Row& row = rows[i];
      row.defined = is_defined_on(c.formula, t) && is_defined_on(effect, t);
      if (!row.defined) continue;
      const std::size_t n = t.size();
      cause_col.assign(n, 0);
      effect_col.assign(n, 0);
      for (std::size_t s = 0; s < n; ++s) {
        cause_col[s] = eval_at(c.formula, t, s);
        effect_col[s] = eval_at(effect, t, s);
      }
      // Suffix scan gives <>e from each step; prefix scan gives the untils.
      bool later = false;
      std::vector<char> effect_from(n);
      for (std::size_t s = n; s-- > 0;) {
        later = later || effect_col[s];
        effect_from[s] = later;
      }
      row.eventually = later;
      bool clean = true;  // no e strictly before s
      bool never = true;
      for (std::size_t s = 0; s < n; ++s) {
        if (clean && cause_col[s] && effect_from[s]) row.ac1 = true;
        if (clean && cause_col[s]) row.premise = true;
        if (cause_col[s] || effect_col[s]) never = false;
        if (effect_col[s]) clean = false;
      }
      row.counterfactual = never;
    }
    return rows;
  }
};

}  // namespace

std::unique_ptr<Backend> make_direct_backend() { return std::make_unique<DirectBackend>(); }
std::unique_ptr<Backend> make_columnar_backend() { return std::make_unique<ColumnarBackend>(); }

}  // namespace tracecause
