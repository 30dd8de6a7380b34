#include "tracecause/formula.hpp"

#include <cctype>
#include <cmath>

#include "tracecause/error.hpp"

namespace tracecause {

struct Formula::Node {
  Kind kind = Kind::constant;
  bool value = false;
  PrimitiveEvent event;
  std::vector<Formula> operands;
  // Cached over the subtree.
  std::optional<std::size_t> max_step;
  bool invariant = true;
};


std::string_view to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::eq: return "=";
    case Comparator::ne: return "!=";
    case Comparator::lt: return "<";
    case Comparator::le: return "<=";
    case Comparator::gt: return ">";
    case Comparator::ge: return ">=";
  }
  return "?";
}

std::size_t TimeIndex::resolve(std::size_t trace_size, std::size_t current) const {
  switch (kind_) {
    case Kind::step: return step_;
    case Kind::last: return trace_size - 1;
    case Kind::current: return current;
  }
  return current;
}

std::string TimeIndex::to_string() const {
  switch (kind_) {
    case Kind::step: return std::to_string(step_);
    case Kind::last: return "n";
    case Kind::current: return "*";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Construction

Formula Formula::constant(bool value) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::constant;
  node->value = value;
  return Formula(std::move(node));
}

Formula Formula::primitive(PrimitiveEvent event) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::primitive;
  node->event = std::move(event);
  if (node->event.index.kind() == TimeIndex::Kind::step) node->max_step = node->event.index.step();
  node->invariant = node->event.index.kind() != TimeIndex::Kind::current;
  return Formula(std::move(node));
}

Formula Formula::primitive(const Signature& signature, std::string_view var, TimeIndex index,
                           Comparator cmp, const Value& value) {
  PrimitiveEvent ev;
  ev.var = signature.require(var);
  const VariableDecl& decl = signature.variable(ev.var);
  ev.var_name = decl.name;
  ev.index = index;
  ev.cmp = cmp;
  ev.discrete = decl.discrete();
  ev.tolerance = decl.tolerance;
  if (ev.discrete && cmp != Comparator::eq && cmp != Comparator::ne) {
    throw Error(Errc::comparator_not_allowed,
                "'" + decl.name + "' is discrete; only = and != are allowed");
  }
  if (!decl.contains(value)) {
    throw Error(Errc::out_of_domain, "value is not in the domain of '" + decl.name + "'");
  }
  ev.value = value;
  ev.value_text = decl.format(value);
  return primitive(std::move(ev));
}

Formula Formula::negation(Formula operand) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::negation;
  node->operands.push_back(std::move(operand));
  node->max_step = node->operands.front().max_step_index();
  node->invariant = node->operands.front().step_invariant();
  return Formula(std::move(node));
}

Formula Formula::conjunction(std::vector<Formula> operands) {
  if (operands.empty()) return constant(true);
  if (operands.size() == 1) return std::move(operands.front());
  auto node = std::make_shared<Node>();
  node->kind = Kind::conjunction;
  node->operands = std::move(operands);
  for (const auto& op : node->operands) {
    if (auto k = op.max_step_index()) node->max_step = std::max(node->max_step.value_or(0), *k);
    node->invariant = node->invariant && op.step_invariant();
  }
  return Formula(std::move(node));
}

Formula Formula::disjunction(std::vector<Formula> operands) {
  if (operands.empty()) return constant(false);
  if (operands.size() == 1) return std::move(operands.front());
  auto node = std::make_shared<Node>();
  node->kind = Kind::disjunction;
  node->operands = std::move(operands);
  for (const auto& op : node->operands) {
    if (auto k = op.max_step_index()) node->max_step = std::max(node->max_step.value_or(0), *k);
    node->invariant = node->invariant && op.step_invariant();
  }
  return Formula(std::move(node));
}

Formula::Kind Formula::kind() const { return node_->kind; }
bool Formula::constant_value() const { return node_->value; }
const PrimitiveEvent& Formula::event() const { return node_->event; }
std::span<const Formula> Formula::operands() const { return node_->operands; }

namespace {

void to_string_into(const Formula& f, std::string& out, int parent_precedence) {
  // precedence: or 1, and 2, unary/atom 3
  switch (f.kind()) {
    case Formula::Kind::constant: {
      // Not expressible in the grammar; these only appear in programmatic
      // formulas.
      out += f.constant_value() ? "true" : "false";
      return;
    }
    case Formula::Kind::primitive: {
      const auto& e = f.event();
      out += e.var_name;
      out += '(';
      out += e.index.to_string();
      out += ") ";
      out += to_string(e.cmp);
      out += ' ';
      out += e.value_text;
      return;
    }
    case Formula::Kind::negation: {
      out += '!';
      const auto& inner = f.operands().front();
      const bool wrap = inner.kind() != Formula::Kind::constant;
      if (wrap) out += '(';
      to_string_into(inner, out, 0);
      if (wrap) out += ')';
      return;
    }
    case Formula::Kind::conjunction:
    case Formula::Kind::disjunction: {
      const bool is_and = f.kind() == Formula::Kind::conjunction;
      const int precedence = is_and ? 2 : 1;
      const bool wrap = parent_precedence > precedence;
      if (wrap) out += '(';
      bool first = true;
      for (const auto& op : f.operands()) {
        if (!first) out += is_and ? " & " : " | ";
        first = false;
        to_string_into(op, out, precedence + 1);
      }
      if (wrap) out += ')';
      return;
    }
  }
}

void collect(const Formula& f, std::vector<PrimitiveEvent>& out) {
  if (f.kind() == Formula::Kind::primitive) {
    out.push_back(f.event());
    return;
  }
  for (const auto& op : f.operands()) collect(op, out);
}

bool same_value(const Value& a, const Value& b) { return a == b; }

}  // namespace

std::string Formula::to_string() const {
  std::string out;
  to_string_into(*this, out, 0);
  return out;
}

std::optional<std::size_t> Formula::max_step_index() const { return node_->max_step; }

bool Formula::step_invariant() const { return node_->invariant; }

std::vector<PrimitiveEvent> Formula::primitives() const {
  std::vector<PrimitiveEvent> out;
  collect(*this, out);
  return out;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::constant: return a.constant_value() == b.constant_value();
    case Formula::Kind::primitive: {
      const auto& x = a.event();
      const auto& y = b.event();
      return x.var == y.var && x.index == y.index && x.cmp == y.cmp &&
             same_value(x.value, y.value);
    }
    default: break;
  }
  auto ao = a.operands();
  auto bo = b.operands();
  if (ao.size() != bo.size()) return false;
  for (std::size_t i = 0; i < ao.size(); ++i) {
    if (!(ao[i] == bo[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, const Signature& sig) : text_(text), sig_(sig) {}

  Formula parse() {
    skip_ws();
    Formula f = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::optional<std::size_t> at = {}) const {
    const std::size_t where = at.value_or(pos_);
    throw Error(Errc::syntax, "at " + std::to_string(where) + ": " + what, where);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) {
      fail(pos_ < text_.size() ? "expected '" + std::string(1, c) + "'"
                               : "expected '" + std::string(1, c) + "' before end of input");
    }
    ++pos_;
  }

  Formula parse_or() {
    std::vector<Formula> ops{parse_and()};
    while (peek('|')) {
      ++pos_;
      ops.push_back(parse_and());
    }
    return Formula::disjunction(std::move(ops));
  }

  Formula parse_and() {
    std::vector<Formula> ops{parse_unary()};
    while (peek('&')) {
      ++pos_;
      ops.push_back(parse_unary());
    }
    return Formula::conjunction(std::move(ops));
  }

  Formula parse_unary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] == '!') {
      ++pos_;
      return Formula::negation(parse_unary());
    }
    if (text_[pos_] == '(') {
      ++pos_;
      Formula f = parse_or();
      expect(')');
      return f;
    }
    return parse_primitive();
  }

  std::string_view identifier() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < text_.size() &&
        (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
    }
    return text_.substr(start, pos_ - start);
  }

  Formula parse_primitive() {
    skip_ws();
    const std::size_t name_at = pos_;
    const std::string_view name = identifier();
    if (name.empty()) fail("expected a variable name");
    auto var = sig_.index_of(name);
    if (!var) {
      throw Error(Errc::unknown_variable,
                  "at " + std::to_string(name_at) + ": unknown variable '" + std::string(name) +
                      "'",
                  name_at);
    }
    const VariableDecl& decl = sig_.variable(*var);

    expect('(');
    skip_ws();
    TimeIndex index = TimeIndex::current();
    if (pos_ < text_.size() && text_[pos_] == '*') {
      ++pos_;
    } else if (pos_ < text_.size() && text_[pos_] == 'n') {
      ++pos_;
      index = TimeIndex::last();
    } else if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      std::size_t k = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        k = k * 10 + static_cast<std::size_t>(text_[pos_] - '0');
        ++pos_;
      }
      index = TimeIndex::at(k);
    } else {
      fail("expected a step index (integer, n or *)");
    }
    expect(')');

    skip_ws();
    const std::size_t cmp_at = pos_;
    Comparator cmp = parse_comparator();
    if (decl.discrete() && cmp != Comparator::eq && cmp != Comparator::ne) {
      throw Error(Errc::comparator_not_allowed,
                  "at " + std::to_string(cmp_at) + ": '" + decl.name +
                      "' is discrete; only = and != are allowed",
                  cmp_at);
    }

    skip_ws();
    const std::size_t value_at = pos_;
    std::string_view lexeme = value_lexeme();
    if (lexeme.empty()) fail("expected a value");

    PrimitiveEvent ev;
    ev.var = *var;
    ev.var_name = decl.name;
    ev.index = index;
    ev.cmp = cmp;
    ev.discrete = decl.discrete();
    ev.tolerance = decl.tolerance;
    if (decl.discrete()) {
      auto token = decl.token_of(lexeme);
      if (!token) {
        throw Error(Errc::out_of_domain,
                    "at " + std::to_string(value_at) + ": '" + std::string(lexeme) +
                        "' is not in the domain of '" + decl.name + "'",
                    value_at);
      }
      ev.value = *token;
    } else {
      auto x = parse_real(lexeme);
      if (!x) fail("expected a number", value_at);
      ev.value = *x;
    }
    ev.value_text = decl.format(ev.value);
    return Formula::primitive(std::move(ev));
  }

  Comparator parse_comparator() {
    auto rest = text_.substr(pos_);
    auto take = [&](std::size_t n, Comparator c) {
      pos_ += n;
      return c;
    };
    if (rest.starts_with("!=")) return take(2, Comparator::ne);
    if (rest.starts_with("==")) return take(2, Comparator::eq);
    if (rest.starts_with("<=")) return take(2, Comparator::le);
    if (rest.starts_with(">=")) return take(2, Comparator::ge);
    if (rest.starts_with("=")) return take(1, Comparator::eq);
    if (rest.starts_with("<")) return take(1, Comparator::lt);
    if (rest.starts_with(">")) return take(1, Comparator::gt);
    fail(rest.empty() ? "expected a comparator before end of input" : "expected a comparator");
  }

  std::string_view value_lexeme() {
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      const bool exp_sign = (c == '-' || c == '+') && pos_ > start &&
                            (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E');
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || exp_sign ||
          ((c == '-' || c == '+') && pos_ == start)) {
        ++pos_;
      } else {
        break;
      }
    }
    return text_.substr(start, pos_ - start);
  }

  std::string_view text_;
  const Signature& sig_;
  std::size_t pos_ = 0;
};

bool eval_primitive(const PrimitiveEvent& e, const Trace& trace, std::size_t step) {
  const std::size_t at = e.index.resolve(trace.size(), step);
  if (at >= trace.size()) {
    throw Error(Errc::index_out_of_range,
                "'" + e.var_name + "(" + e.index.to_string() + ")' is past the end of trace '" +
                    trace.id() + "' (" + std::to_string(trace.size()) + " steps)");
  }
  const Value& actual = trace.at(at, e.var);
  if (e.discrete) {
    const bool same = std::get<Token>(actual) == std::get<Token>(e.value);
    return e.cmp == Comparator::eq ? same : !same;
  }
  const double x = std::get<double>(actual);
  const double target = std::get<double>(e.value);
  switch (e.cmp) {
    case Comparator::eq: return std::fabs(x - target) <= e.tolerance;
    case Comparator::ne: return !(std::fabs(x - target) <= e.tolerance);
    case Comparator::lt: return x < target;
    case Comparator::le: return x <= target;
    case Comparator::gt: return x > target;
    case Comparator::ge: return x >= target;
  }
  return false;
}

}  // namespace

Formula parse_formula(std::string_view text, const Signature& signature) {
  return Parser(text, signature).parse();
}

// ---------------------------------------------------------------------------
// Evaluation

bool is_defined_on(const Formula& f, const Trace& trace) {
  auto k = f.max_step_index();
  return !k || *k < trace.size();
}

namespace {

bool eval_node(const Formula& f, const Trace& trace, std::size_t step) {
  switch (f.kind()) {
    case Formula::Kind::constant: return f.constant_value();
    case Formula::Kind::primitive: return eval_primitive(f.event(), trace, step);
    case Formula::Kind::negation: return !eval_node(f.operands().front(), trace, step);
    case Formula::Kind::conjunction:
      for (const auto& op : f.operands()) {
        if (!eval_node(op, trace, step)) return false;
      }
      return true;
    case Formula::Kind::disjunction:
      for (const auto& op : f.operands()) {
        if (eval_node(op, trace, step)) return true;
      }
      return false;
  }
  return false;
}

}  // namespace

bool eval_at(const Formula& f, const Trace& trace, std::size_t step) {
  if (step >= trace.size()) {
    throw Error(Errc::index_out_of_range, "step " + std::to_string(step) +
                                              " is past the end of trace '" + trace.id() + "'");
  }
  if (!is_defined_on(f, trace)) {
    throw Error(Errc::index_out_of_range, "'" + f.to_string() + "' refers past the end of trace '" +
                                              trace.id() + "'");
  }
  return eval_node(f, trace, step);
}

bool holds_always(const Formula& f, const Trace& trace) {
  if (f.step_invariant()) return eval_at(f, trace, 0);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!eval_at(f, trace, i)) return false;
  }
  return true;
}

bool holds_eventually(const Formula& f, const Trace& trace) {
  return holds_eventually_from(f, trace, 0);
}

bool holds_eventually_from(const Formula& f, const Trace& trace, std::size_t from) {
  if (f.step_invariant()) return from < trace.size() && eval_at(f, trace, 0);
  for (std::size_t i = from; i < trace.size(); ++i) {
    if (eval_at(f, trace, i)) return true;
  }
  return false;
}

bool holds_until(const Formula& p, const Formula& q, const Trace& trace) {
  if (q.step_invariant()) return eval_at(q, trace, 0);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (eval_at(q, trace, i)) return true;
    if (!eval_at(p, trace, i)) return false;
  }
  return false;
}

}  // namespace tracecause
