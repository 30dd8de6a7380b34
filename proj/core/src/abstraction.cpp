#include "tracecause/abstraction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <unordered_map>
#include <utility>

#include "tracecause/error.hpp"

namespace tracecause {

// ---------------------------------------------------------------------------
// Under-approximation

std::size_t sample_size(std::size_t n, double alpha) {
  const double want = std::ceil(alpha * static_cast<double>(n) - 1e-9);
  const auto k = static_cast<std::size_t>(std::max(1.0, want));
  return std::min(k, n);
}

namespace {

std::vector<std::size_t> shuffled_positions(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

UnderApprox take(const TraceLog& log, double alpha, std::uint64_t seed) {
  const auto order = shuffled_positions(log.size(), seed);
  UnderApprox u{log.prefix(0), {}, alpha, seed};
  u.indices.assign(order.begin(),
                   order.begin() + static_cast<std::ptrdiff_t>(sample_size(log.size(), alpha)));
  std::sort(u.indices.begin(), u.indices.end());
  u.selected = log.subset(u.indices);
  return u;
}

}  // namespace

UnderApprox under_approximate(const TraceLog& log, double alpha, std::uint64_t seed) {
  if (log.empty()) throw Error(Errc::empty_log, "cannot sample an empty log");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(Errc::invalid_argument, "alpha must lie in (0, 1]");
  }
  return take(log, alpha, seed);
}

UnderApprox refine_under(const UnderApprox& u, const TraceLog& full) {
  if (u.alpha >= 1.0) throw Error(Errc::exhausted, "alpha is already 1");
  return take(full, std::min(1.0, u.alpha * 2.0), u.seed);
}

// ---------------------------------------------------------------------------
// Over-approximation

namespace {

std::int64_t grid_side(double beta) { return std::max<std::int64_t>(1, std::llround(beta * 1e9)); }

std::int64_t cell_of(double value, double lo, double width, std::int64_t side) {
  if (!(width > 0.0)) return 0;
  const double normalized = std::clamp((value - lo) / width, 0.0, 1.0);
  return static_cast<std::int64_t>(std::floor(normalized * 1e9)) / side;
}

}  // namespace

std::int64_t grid_cell(double value, const ContinuousDomain& domain, double beta) {
  return cell_of(value, domain.lo, domain.width(), grid_side(beta));
}

namespace {

// Open-addressing map from fixed-length integer keys to state ids.
class KeyTable {
 public:
  explicit KeyTable(std::size_t key_len) : len_(key_len), slots_(1024, kEmpty) {}

  // Id stored for `key`, inserting `fresh_id` if absent.
  std::pair<std::size_t, bool> insert(const std::vector<std::int64_t>& key, std::size_t fresh_id) {
    const std::uint64_t h = hash(key);
    std::size_t mask = slots_.size() - 1;
    for (std::size_t i = h & mask;; i = (i + 1) & mask) {
      const std::uint32_t id = slots_[i];
      if (id == kEmpty) break;
      if (std::equal(key.begin(), key.end(), keys_.begin() + static_cast<std::ptrdiff_t>(id * len_))) {
        return {id, false};
      }
    }
    keys_.insert(keys_.end(), key.begin(), key.end());
    ++count_;
    if (count_ * 2 > slots_.size()) {
      slots_.assign(slots_.size() * 2, kEmpty);
      mask = slots_.size() - 1;
      for (std::size_t id = 0; id + 1 < count_; ++id) place(id, mask);
    }
    place(fresh_id, mask);
    return {fresh_id, true};
  }

 private:
  static constexpr std::uint32_t kEmpty = 0xffffffffu;

  std::uint64_t hash(std::span<const std::int64_t> key) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::int64_t k : key) {
      h ^= static_cast<std::uint64_t>(k);
      h *= 0xff51afd7ed558ccdull;
      h ^= h >> 33;
    }
    return h;
  }

  void place(std::size_t id, std::size_t mask) {
    const auto key = std::span<const std::int64_t>(keys_).subspan(id * len_, len_);
    std::size_t i = hash(key) & mask;
    while (slots_[i] != kEmpty) i = (i + 1) & mask;
    slots_[i] = static_cast<std::uint32_t>(id);
  }

  std::size_t len_;
  std::vector<std::uint32_t> slots_;
  std::vector<std::int64_t> keys_;
  std::size_t count_ = 0;
};

double as_number(const Value& v) {
  if (const auto* t = std::get_if<Token>(&v)) return static_cast<double>(static_cast<std::int32_t>(*t));
  return std::get<double>(v);
}

std::int64_t exact_bits(const Value& v) {
  if (const auto* t = std::get_if<Token>(&v)) return static_cast<std::int64_t>(*t);
  const double x = std::get<double>(v);
  return std::bit_cast<std::int64_t>(x == 0.0 ? 0.0 : x);
}

}  // namespace

void AbstractModel::summarize(AbstractState& s) const {
  const Signature& sig = log_.signature();
  const std::size_t width = sig.size();
  s.lo.assign(width, 0.0);
  s.hi.assign(width, 0.0);
  s.representative.values.assign(width, Value{});
  const StateRef first = s.members.front();
  for (VarIndex v = 0; v < width; ++v) {
    const bool discrete = sig.variable(v).discrete();
    double lo = INFINITY;
    double hi = -INFINITY;
    double sum = 0.0;
    for (const StateRef& r : s.members) {
      const Value& value = log_[r.trace].at(r.step, v);
      const double x = discrete ? static_cast<double>(static_cast<std::int32_t>(std::get<Token>(value)))
                                : std::get<double>(value);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      sum += x;
    }
    s.lo[v] = lo;
    s.hi[v] = hi;
    if (discrete) {
      s.representative.values[v] = log_[first.trace].at(first.step, v);
    } else {
      s.representative.values[v] = sum / static_cast<double>(s.members.size());
    }
  }
}

std::size_t AbstractModel::split(const std::vector<std::size_t>& ids) {
  std::size_t added = 0;
  for (std::size_t id : ids) {
    if (states_.at(id).members.size() < 2) continue;
    std::vector<StateRef> members = std::move(states_[id].members);
    states_[id].members = {members.front()};
    summarize(states_[id]);
    const AbstractState proto = states_[id];
    for (std::size_t k = 1; k < members.size(); ++k) {
      AbstractState s;
      s.id = states_.size();
      s.step = proto.step;
      s.defined = proto.defined;
      s.cause = proto.cause;
      s.effect = proto.effect;
      s.members = {members[k]};
      summarize(s);
      abstract_traces_[members[k].trace][members[k].step] = s.id;
      states_.push_back(std::move(s));
      ++added;
    }
  }
  return added;
}

AbstractModel over_approximate(const TraceLog& log, double beta, const CauseCandidate& candidate,
                               const Formula& effect) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(Errc::invalid_argument, "beta must be a finite value >= 0");
  }
  AbstractModel m(log, candidate, effect, beta);
  const Signature& sig = log.signature();

  // Variables in the key, with the grid used for each (none = exact).
  struct KeyVar {
    VarIndex var;
    bool grid;
    double lo = 0.0;
    double width = 0.0;
  };
  std::vector<KeyVar> key_vars;
  if (beta == 0.0) {
    for (VarIndex v = 0; v < sig.size(); ++v) key_vars.push_back({v, false});
  } else {
    VarSet zx = candidate.partition.z;
    zx.insert(zx.end(), candidate.partition.x.begin(), candidate.partition.x.end());
    std::sort(zx.begin(), zx.end());
    zx.erase(std::unique(zx.begin(), zx.end()), zx.end());
    for (VarIndex v : zx) {
      const VariableDecl& d = sig.variable(v);
      if (d.discrete()) {
        key_vars.push_back({v, false});
      } else {
        key_vars.push_back({v, true, d.continuous_domain().lo, d.continuous_domain().width()});
      }
    }
  }

  const std::size_t width = sig.size();
  const std::size_t key_len = 4 + key_vars.size();
  const std::int64_t side = grid_side(beta);
  KeyTable index(key_len);
  std::vector<std::int64_t> key(key_len);
  std::vector<double> sums;
  m.abstract_traces_.resize(log.size());
  for (std::size_t ti = 0; ti < log.size(); ++ti) {
    const Trace& t = log[ti];
    const bool defined = is_defined_on(candidate.formula, t) && is_defined_on(effect, t);
    const bool c_fixed = defined && candidate.formula.step_invariant() &&
                         eval_at(candidate.formula, t, 0);
    const bool e_fixed = defined && effect.step_invariant() && eval_at(effect, t, 0);
    auto& row = m.abstract_traces_[ti];
    row.resize(t.size());
    for (std::size_t step = 0; step < t.size(); ++step) {
      const bool c = candidate.formula.step_invariant()
                         ? c_fixed
                         : defined && eval_at(candidate.formula, t, step);
      const bool e = effect.step_invariant() ? e_fixed : defined && eval_at(effect, t, step);
      key[0] = static_cast<std::int64_t>(step);
      key[1] = defined;
      key[2] = c;
      key[3] = e;
      for (std::size_t k = 0; k < key_vars.size(); ++k) {
        const KeyVar& kv = key_vars[k];
        key[4 + k] = kv.grid ? cell_of(t.real(step, kv.var), kv.lo, kv.width, side)
                             : exact_bits(t.at(step, kv.var));
      }
      const auto [id, fresh] = index.insert(key, m.states_.size());
      if (fresh) {
        AbstractState s;
        s.id = id;
        s.step = step;
        s.defined = defined;
        s.cause = c;
        s.effect = e;
        s.lo.assign(width, INFINITY);
        s.hi.assign(width, -INFINITY);
        s.representative.values.assign(t.state(step).begin(), t.state(step).end());
        m.states_.push_back(std::move(s));
        sums.resize(sums.size() + width, 0.0);
      }
      AbstractState& s = m.states_[id];
      s.members.push_back({static_cast<std::uint32_t>(ti), static_cast<std::uint32_t>(step)});
      for (VarIndex v = 0; v < width; ++v) {
        const double x = as_number(t.at(step, v));
        s.lo[v] = std::min(s.lo[v], x);
        s.hi[v] = std::max(s.hi[v], x);
        sums[id * width + v] += x;
      }
      row[step] = id;
      ++m.concrete_states_;
    }
  }
  for (auto& s : m.states_) {
    for (VarIndex v = 0; v < width; ++v) {
      if (sig.variable(v).discrete()) continue;
      s.representative.values[v] = sums[s.id * width + v] / static_cast<double>(s.members.size());
    }
  }
  return m;
}

InterventionMap map_intervention(const AbstractModel& m) {
  InterventionMap out;
  const Signature& sig = m.log().signature();
  for (const PrimitiveEvent& e : m.candidate().formula.primitives()) {
    if (e.index.kind() != TimeIndex::Kind::step) continue;
    const VariableDecl& decl = sig.variable(e.var);
    for (const AbstractState& s : m.states()) {
      if (s.step != e.index.step()) continue;
      bool hit = false;
      bool miss = false;
      for (const StateRef& r : s.members) {
        (decl.equal(m.log()[r.trace].at(r.step, e.var), e.value) ? hit : miss) = true;
        if (hit && miss) break;
      }
      if (hit) out.image.push_back(s.id);
      if (hit && miss) out.mixed.push_back(s.id);
    }
  }
  std::sort(out.image.begin(), out.image.end());
  out.image.erase(std::unique(out.image.begin(), out.image.end()), out.image.end());
  std::sort(out.mixed.begin(), out.mixed.end());
  out.mixed.erase(std::unique(out.mixed.begin(), out.mixed.end()), out.mixed.end());
  out.defined = out.mixed.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Abstract AC2(b)

namespace {

struct SeqHash {
  std::size_t operator()(const std::vector<std::size_t>* seq) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t k : *seq) h ^= k + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

struct SeqEq {
  bool operator()(const std::vector<std::size_t>* a, const std::vector<std::size_t>* b) const {
    return *a == *b;
  }
};

bool may_agree(const AbstractState& a, const AbstractState& b, const VarSet& vars,
               const Signature& sig) {
  if (a.id == b.id) return true;
  for (VarIndex v : vars) {
    const double tol = sig.variable(v).tolerance;
    if (a.lo[v] > b.hi[v] + tol || b.lo[v] > a.hi[v] + tol) return false;
  }
  return true;
}

bool may_differ(const AbstractState& a, const AbstractState& b, const VarSet& vars,
                const Signature& sig) {
  for (VarIndex v : vars) {
    const double tol = sig.variable(v).tolerance;
    if (std::max(a.hi[v] - b.lo[v], b.hi[v] - a.lo[v]) > tol) return true;
  }
  return false;
}

}  // namespace

AbstractAc2bResult check_ac2b_abstract(const AbstractModel& m, std::size_t tau,
                                       const CheckOptions& options) {
  const Signature& sig = m.log().signature();
  const Partition& part = m.candidate().partition;
  const auto through = equiv_horizon(m.candidate(), options);
  const auto& tau_seq = m.abstract_trace(tau);

  // Group concrete traces by abstract trace, in order of first appearance.
  std::unordered_map<const std::vector<std::size_t>*, std::size_t, SeqHash, SeqEq> group_of;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t ti = 0; ti < m.log().size(); ++ti) {
    auto [it, fresh] = group_of.try_emplace(&m.abstract_trace(ti), groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(ti);
  }

  AbstractAc2bResult result;
  for (const auto& members : groups) {
    ++result.examined;
    const auto& seq = m.abstract_trace(members.front());
    if (seq.empty() || !m.state(seq.front()).defined) continue;

    std::size_t steps = 0;
    if (through) {
      if (seq.size() <= *through || tau_seq.size() <= *through) continue;
      steps = *through + 1;
    } else {
      if (seq.size() != tau_seq.size()) continue;
      steps = seq.size();
    }
    bool compatible = true;
    for (std::size_t i = 0; i < steps && compatible; ++i) {
      compatible = may_agree(m.state(tau_seq[i]), m.state(seq[i]), part.z, sig);
    }
    if (!compatible) continue;
    if (!part.w.empty()) {
      bool differ = false;
      for (std::size_t i = 0; i < steps && !differ; ++i) {
        differ = may_differ(m.state(tau_seq[i]), m.state(seq[i]), part.w, sig);
      }
      if (!differ) continue;
    }

    bool premise = false;
    bool effect = false;
    for (std::size_t id : seq) {
      const AbstractState& s = m.state(id);
      if (!effect && !premise && s.cause) premise = true;
      if (s.effect) effect = true;
    }
    if (premise && !effect) {
      result.counterexample = AbstractCounterexample{seq, members};
      return result;
    }
  }
  return result;
}

std::optional<std::size_t> concretize(const AbstractModel& m, std::size_t tau,
                                      const AbstractCounterexample& cex,
                                      const CheckOptions& options) {
  const Signature& sig = m.log().signature();
  const CauseCandidate& c = m.candidate();
  const auto through = equiv_horizon(c, options);
  const Trace& witness = m.log()[tau];
  for (std::size_t ti : cex.concretization) {
    const Trace& t = m.log()[ti];
    if (!trace_equiv(witness, t, c.partition.z, sig, through)) continue;
    if (!c.partition.w.empty() && trace_equiv(witness, t, c.partition.w, sig, through)) continue;
    if (!satisfies_ac2b_premise(t, c.formula, m.effect())) continue;
    if (!holds_eventually(m.effect(), t)) return ti;
  }
  return std::nullopt;
}

AbstractModel refine_over(AbstractModel m, const AbstractCounterexample& cex, std::size_t tau) {
  auto splittable = [&](const std::vector<std::size_t>& seq) {
    std::vector<std::size_t> ids;
    for (std::size_t id : seq) {
      if (m.state(id).members.size() > 1) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  };
  auto ids = splittable(cex.states);
  if (ids.empty()) ids = splittable(m.abstract_trace(tau));
  if (ids.empty()) {
    throw Error(Errc::no_split, "no merged state left on the counterexample or the witness");
  }
  m.split(ids);
  return m;
}

}  // namespace tracecause
