#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace tracecause {

enum class VariableKind { exogenous, endogenous };

struct ContinuousDomain {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

// Canonical token texts; a token's position in `values` is its Token index.
struct DiscreteDomain {
  std::vector<std::string> values;
};

using Domain = std::variant<ContinuousDomain, DiscreteDomain>;

// Exact discrete value: index into the variable's DiscreteDomain.
enum class Token : std::int32_t {};

using Value = std::variant<double, Token>;

using VarIndex = std::size_t;
// Sorted, duplicate-free set of variable indices.
using VarSet = std::vector<VarIndex>;

inline constexpr double kDefaultTolerance = 1e-6;

struct VariableDecl {
  std::string name;
  VariableKind kind = VariableKind::endogenous;
  Domain domain;
  double tolerance = 0.0;

  bool discrete() const { return std::holds_alternative<DiscreteDomain>(domain); }
  bool endogenous() const { return kind == VariableKind::endogenous; }
  const ContinuousDomain& continuous_domain() const;
  const DiscreteDomain& discrete_domain() const;

  std::optional<Token> token_of(std::string_view text) const;
  bool contains(const Value& v) const;
  // Exact for discrete values, |a - b| <= tolerance for continuous ones.
  bool equal(const Value& a, const Value& b) const;
  std::string format(const Value& v) const;
};

struct Edge {
  std::string parent;
  std::string child;
};

// Causal signature: variables with domains plus dependency edges.
//
// `transition_edges` relate a variable at step t to a variable at step t+1
// and may form cycles (pos -> vel -> pos); the time-unrolled graph is acyclic
// regardless. `instant_edges` relate variables within one step and must be
// acyclic.
class Signature {
 public:
  Signature(std::vector<VariableDecl> variables, std::vector<Edge> transition_edges,
            std::vector<Edge> instant_edges = {});

  std::size_t size() const { return variables_.size(); }
  const VariableDecl& variable(VarIndex i) const { return variables_.at(i); }
  const std::vector<VariableDecl>& variables() const { return variables_; }
  const std::vector<Edge>& transition_edges() const { return transition_edges_; }
  const std::vector<Edge>& instant_edges() const { return instant_edges_; }

  std::optional<VarIndex> index_of(std::string_view name) const;
  // Throws Errc::unknown_variable.
  VarIndex require(std::string_view name) const;
  VarSet resolve(const std::vector<std::string>& names) const;
  std::vector<std::string> names(const VarSet& vars) const;

  const VarSet& endogenous() const { return endogenous_; }
  const VarSet& exogenous() const { return exogenous_; }
  std::span<const VarIndex> children(VarIndex i) const { return children_.at(i); }
  // All variables reachable from `roots` through either edge kind, roots included.
  VarSet reachable_from(const VarSet& roots) const;

 private:
  std::vector<VariableDecl> variables_;
  std::vector<Edge> transition_edges_;
  std::vector<Edge> instant_edges_;
  std::unordered_map<std::string, VarIndex> by_name_;
  std::vector<std::vector<VarIndex>> children_;
  VarSet endogenous_;
  VarSet exogenous_;
};

using StateView = std::span<const Value>;

struct State {
  std::vector<Value> values;

  StateView view() const { return values; }
  const Value& operator[](VarIndex i) const { return values.at(i); }
};

// One finite execution: states stored row-major, `width` values per step.
class Trace {
 public:
  Trace(std::string id, std::size_t width, std::vector<Value> cells);
  static Trace from_states(std::string id, const std::vector<State>& states);

  const std::string& id() const { return id_; }
  std::size_t size() const { return cells_.size() / width_; }
  std::size_t last() const { return size() - 1; }
  std::size_t width() const { return width_; }

  StateView state(std::size_t step) const {
    return StateView(cells_).subspan(step * width_, width_);
  }
  const Value& at(std::size_t step, VarIndex var) const { return cells_[step * width_ + var]; }
  double real(std::size_t step, VarIndex var) const { return std::get<double>(at(step, var)); }
  Token token(std::size_t step, VarIndex var) const { return std::get<Token>(at(step, var)); }

 private:
  std::string id_;
  std::size_t width_;
  std::vector<Value> cells_;
};

// Ordered, id-unique collection of traces over one signature. Traces are
// shared between a log and the subsets carved out of it.
class TraceLog {
 public:
  TraceLog(std::shared_ptr<const Signature> signature,
           std::vector<std::shared_ptr<const Trace>> traces);
  TraceLog(Signature signature, std::vector<Trace> traces);

  const Signature& signature() const { return *signature_; }
  const std::shared_ptr<const Signature>& signature_ptr() const { return signature_; }

  std::size_t size() const { return traces_.size(); }
  bool empty() const { return traces_.empty(); }
  const Trace& trace(std::size_t i) const { return *traces_.at(i); }
  const Trace& operator[](std::size_t i) const { return *traces_[i]; }
  std::optional<std::size_t> find(std::string_view id) const;

  // Selected traces in the given index order; no re-validation.
  TraceLog subset(std::span<const std::size_t> indices) const;
  TraceLog prefix(std::size_t n) const;

 private:
  struct Unchecked {};
  TraceLog(Unchecked, std::shared_ptr<const Signature> signature,
           std::vector<std::shared_ptr<const Trace>> traces);
  void index_ids();

  std::shared_ptr<const Signature> signature_;
  std::vector<std::shared_ptr<const Trace>> traces_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

enum class DomainPolicy { strict, clamp };

inline constexpr int kFormatVersion = 1;

// Sidecar JSON; see docs/formats.md.
Signature parse_signature(std::string_view text);
std::string serialize_signature(const Signature& signature);
Signature load_signature(const std::string& path);

// CSV with header `trace_id,step,<var>...`; see docs/formats.md.
TraceLog parse_trace_log(std::istream& in, std::shared_ptr<const Signature> signature,
                         DomainPolicy policy = DomainPolicy::strict);
TraceLog parse_trace_log(std::string_view text, std::shared_ptr<const Signature> signature,
                         DomainPolicy policy = DomainPolicy::strict);
TraceLog load_trace_log(const std::string& path, std::shared_ptr<const Signature> signature,
                        DomainPolicy policy = DomainPolicy::strict);
void write_trace_log(std::ostream& out, const TraceLog& log);
std::string serialize_trace_log(const TraceLog& log);

// Euclidean distance over `vars`, each coordinate divided by its domain width.
// Only continuous endogenous variables may be selected.
double state_distance(const Signature& signature, StateView a, StateView b,
                      std::span<const VarIndex> vars);
double state_distance(const Signature& signature, StateView a, StateView b,
                      const std::vector<std::string>& vars);

// Shortest text that parses back to the same double.
std::string format_real(double x);
std::optional<double> parse_real(std::string_view text);

}  // namespace tracecause
