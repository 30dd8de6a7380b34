#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracecause/trace_model.hpp"

namespace tracecause {

enum class Comparator { eq, ne, lt, le, gt, ge };

std::string_view to_string(Comparator cmp);

// Step a primitive event refers to: a fixed step k, the last step `n`, or
// the step under evaluation `*`.
class TimeIndex {
 public:
  enum class Kind { step, last, current };

  static TimeIndex at(std::size_t step) { return TimeIndex(Kind::step, step); }
  static TimeIndex last() { return TimeIndex(Kind::last, 0); }
  static TimeIndex current() { return TimeIndex(Kind::current, 0); }

  Kind kind() const { return kind_; }
  std::size_t step() const { return step_; }
  std::size_t resolve(std::size_t trace_size, std::size_t current) const;
  std::string to_string() const;

  friend bool operator==(const TimeIndex&, const TimeIndex&) = default;

 private:
  TimeIndex(Kind kind, std::size_t step) : kind_(kind), step_(step) {}
  Kind kind_;
  std::size_t step_;
};

// `var(index) cmp value`, resolved against a signature at parse time.
struct PrimitiveEvent {
  VarIndex var = 0;
  std::string var_name;
  TimeIndex index = TimeIndex::current();
  Comparator cmp = Comparator::eq;
  Value value;
  std::string value_text;
  bool discrete = false;
  double tolerance = 0.0;
};

// Immutable, state-based causal formula: primitive events under ! & |.
class Formula {
 public:
  enum class Kind { constant, primitive, negation, conjunction, disjunction };

  static Formula constant(bool value);
  static Formula primitive(PrimitiveEvent event);
  // Builds a primitive by name; throws like parse_formula does.
  static Formula primitive(const Signature& signature, std::string_view var, TimeIndex index,
                           Comparator cmp, const Value& value);
  static Formula negation(Formula operand);
  static Formula conjunction(std::vector<Formula> operands);
  static Formula disjunction(std::vector<Formula> operands);

  Kind kind() const;
  bool constant_value() const;
  const PrimitiveEvent& event() const;
  std::span<const Formula> operands() const;

  // DSL text; parse_formula(to_string()) rebuilds an equal formula.
  std::string to_string() const;
  // Largest concrete step index mentioned, if any.
  std::optional<std::size_t> max_step_index() const;
  // No `*` index anywhere: the truth value is the same at every step.
  bool step_invariant() const;
  std::vector<PrimitiveEvent> primitives() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Grammar:
//   formula := or
//   or      := and ('|' and)*
//   and     := unary ('&' unary)*
//   unary   := '!' unary | '(' formula ')' | prim
//   prim    := IDENT '(' (INT | 'n' | '*') ')' CMP value
//   CMP     := '=' | '==' | '!=' | '<' | '<=' | '>' | '>='
// Discrete variables take `=`/`!=` against a domain token (number or
// identifier); continuous ones take any comparator against a number.
// Errors carry the 0-based character offset in Error::location().
Formula parse_formula(std::string_view text, const Signature& signature);

// True when every concrete index in `f` names a step of `trace`.
bool is_defined_on(const Formula& f, const Trace& trace);

// Truth at `step` with `*` bound to step and `n` to the last step.
// Throws Errc::index_out_of_range when `step` or any concrete index in `f` is
// past the end of the trace.
bool eval_at(const Formula& f, const Trace& trace, std::size_t step);

bool holds_always(const Formula& f, const Trace& trace);
bool holds_eventually(const Formula& f, const Trace& trace);
// Exists i >= from with f at i.
bool holds_eventually_from(const Formula& f, const Trace& trace, std::size_t from);
// Exists i with q at i and p at every j < i.
bool holds_until(const Formula& p, const Formula& q, const Trace& trace);

}  // namespace tracecause
