#include "tracecause/trace_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "tracecause/error.hpp"

namespace tracecause {

namespace {

using nlohmann::json;

std::string canonical_token(std::string_view text) {
  if (auto x = parse_real(text)) {
    double integral = 0.0;
    if (std::modf(*x, &integral) == 0.0 && std::fabs(*x) < 9.0e15) {
      return std::to_string(static_cast<long long>(integral));
    }
    return format_real(*x);
  }
  return std::string(text);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

// 1-based line of a byte offset, for JSON parse errors.
std::size_t line_of(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

Error field_error(Errc code, const std::string& field, const std::string& what) {
  return Error(code, field + ": " + what);
}

void check_instant_acyclic(const std::vector<VariableDecl>& vars,
                           const std::vector<std::vector<VarIndex>>& instant_children) {
  enum class Mark { none, active, done };
  std::vector<Mark> mark(vars.size(), Mark::none);
  std::function<void(VarIndex)> visit = [&](VarIndex v) {
    mark[v] = Mark::active;
    for (VarIndex c : instant_children[v]) {
      if (mark[c] == Mark::active) {
        throw Error(Errc::cyclic_dependency,
                    "instant dependency cycle through '" + vars[c].name + "'");
      }
      if (mark[c] == Mark::none) visit(c);
    }
    mark[v] = Mark::done;
  };
  for (VarIndex v = 0; v < vars.size(); ++v) {
    if (mark[v] == Mark::none) visit(v);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// VariableDecl

const ContinuousDomain& VariableDecl::continuous_domain() const {
  return std::get<ContinuousDomain>(domain);
}

const DiscreteDomain& VariableDecl::discrete_domain() const {
  return std::get<DiscreteDomain>(domain);
}

std::optional<Token> VariableDecl::token_of(std::string_view text) const {
  if (!discrete()) return std::nullopt;
  const auto& values = discrete_domain().values;
  auto exact = std::find(values.begin(), values.end(), text);
  if (exact != values.end()) return Token{static_cast<std::int32_t>(exact - values.begin())};
  const std::string canon = canonical_token(text);
  auto it = std::find(values.begin(), values.end(), canon);
  if (it == values.end()) return std::nullopt;
  return Token{static_cast<std::int32_t>(it - values.begin())};
}

bool VariableDecl::contains(const Value& v) const {
  if (discrete()) {
    const auto* t = std::get_if<Token>(&v);
    return t != nullptr && static_cast<std::size_t>(*t) < discrete_domain().values.size() &&
           static_cast<std::int32_t>(*t) >= 0;
  }
  const auto* x = std::get_if<double>(&v);
  const auto& d = continuous_domain();
  return x != nullptr && *x >= d.lo && *x <= d.hi;
}

bool VariableDecl::equal(const Value& a, const Value& b) const {
  if (discrete()) return std::get<Token>(a) == std::get<Token>(b);
  return std::fabs(std::get<double>(a) - std::get<double>(b)) <= tolerance;
}

std::string VariableDecl::format(const Value& v) const {
  if (const auto* t = std::get_if<Token>(&v)) {
    return discrete_domain().values.at(static_cast<std::size_t>(*t));
  }
  return format_real(std::get<double>(v));
}

// ---------------------------------------------------------------------------
// Signature

Signature::Signature(std::vector<VariableDecl> variables, std::vector<Edge> transition_edges,
                     std::vector<Edge> instant_edges)
    : variables_(std::move(variables)),
      transition_edges_(std::move(transition_edges)),
      instant_edges_(std::move(instant_edges)) {
  if (variables_.empty()) {
    throw Error(Errc::empty_signature, "signature declares no variables");
  }
  for (VarIndex i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    if (v.name.empty()) throw Error(Errc::parse, "variable name must not be empty");
    if (!by_name_.emplace(v.name, i).second) {
      throw Error(Errc::duplicate_name, "duplicate variable '" + v.name + "'");
    }
    if (v.discrete()) {
      const auto& values = v.discrete_domain().values;
      if (values.empty()) {
        throw Error(Errc::malformed_domain, "'" + v.name + "': discrete domain is empty");
      }
      for (std::size_t a = 0; a < values.size(); ++a) {
        for (std::size_t b = a + 1; b < values.size(); ++b) {
          if (values[a] == values[b]) {
            throw Error(Errc::malformed_domain,
                        "'" + v.name + "': repeated domain value " + values[a]);
          }
        }
      }
      if (v.tolerance != 0.0) {
        throw Error(Errc::malformed_domain,
                    "'" + v.name + "': discrete variables must have tolerance 0");
      }
    } else {
      const auto& d = v.continuous_domain();
      if (!(d.lo <= d.hi) || !std::isfinite(d.lo) || !std::isfinite(d.hi)) {
        throw Error(Errc::malformed_domain, "'" + v.name + "': need finite lo <= hi");
      }
      if (!(v.tolerance >= 0.0)) {
        throw Error(Errc::malformed_domain, "'" + v.name + "': tolerance must be >= 0");
      }
    }
    (v.endogenous() ? endogenous_ : exogenous_).push_back(i);
  }

  children_.resize(variables_.size());
  std::vector<std::vector<VarIndex>> instant_children(variables_.size());
  auto resolve_edge = [&](const Edge& e) {
    auto p = index_of(e.parent);
    auto c = index_of(e.child);
    if (!p || !c) {
      const auto& missing = p ? e.child : e.parent;
      throw Error(Errc::undeclared_variable,
                  "edge " + e.parent + " -> " + e.child + " references undeclared '" +
                      missing + "'");
    }
    return std::pair{*p, *c};
  };
  auto add_child = [&](VarIndex p, VarIndex c) {
    auto& kids = children_[p];
    if (std::find(kids.begin(), kids.end(), c) == kids.end()) kids.push_back(c);
  };
  for (const auto& e : transition_edges_) {
    auto [p, c] = resolve_edge(e);
    add_child(p, c);
  }
  for (const auto& e : instant_edges_) {
    auto [p, c] = resolve_edge(e);
    add_child(p, c);
    instant_children[p].push_back(c);
  }
  check_instant_acyclic(variables_, instant_children);
}

std::optional<VarIndex> Signature::index_of(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

VarIndex Signature::require(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw Error(Errc::unknown_variable, "unknown variable '" + std::string(name) + "'");
}

VarSet Signature::resolve(const std::vector<std::string>& names) const {
  VarSet out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(require(n));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> Signature::names(const VarSet& vars) const {
  std::vector<std::string> out;
  out.reserve(vars.size());
  for (VarIndex v : vars) out.push_back(variables_.at(v).name);
  return out;
}

VarSet Signature::reachable_from(const VarSet& roots) const {
  std::vector<bool> seen(variables_.size(), false);
  std::vector<VarIndex> stack(roots.begin(), roots.end());
  for (VarIndex r : roots) seen.at(r) = true;
  while (!stack.empty()) {
    VarIndex v = stack.back();
    stack.pop_back();
    for (VarIndex c : children_[v]) {
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  VarSet out;
  for (VarIndex v = 0; v < seen.size(); ++v) {
    if (seen[v]) out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trace / TraceLog

Trace::Trace(std::string id, std::size_t width, std::vector<Value> cells)
    : id_(std::move(id)), width_(width), cells_(std::move(cells)) {
  if (width_ == 0 || cells_.empty()) {
    throw Error(Errc::empty_trace, "trace '" + id_ + "' has no states");
  }
  if (cells_.size() % width_ != 0) {
    throw Error(Errc::invalid_argument, "trace '" + id_ + "': ragged state data");
  }
}

Trace Trace::from_states(std::string id, const std::vector<State>& states) {
  if (states.empty()) throw Error(Errc::empty_trace, "trace '" + id + "' has no states");
  const std::size_t width = states.front().values.size();
  std::vector<Value> cells;
  cells.reserve(width * states.size());
  for (const auto& s : states) {
    if (s.values.size() != width) {
      throw Error(Errc::invalid_argument, "trace '" + id + "': states of different width");
    }
    cells.insert(cells.end(), s.values.begin(), s.values.end());
  }
  return Trace(std::move(id), width, std::move(cells));
}

TraceLog::TraceLog(std::shared_ptr<const Signature> signature,
                   std::vector<std::shared_ptr<const Trace>> traces)
    : signature_(std::move(signature)), traces_(std::move(traces)) {
  if (!signature_) throw Error(Errc::invalid_argument, "trace log needs a signature");
  const auto& sig = *signature_;
  for (const auto& tr : traces_) {
    if (!tr) throw Error(Errc::invalid_argument, "null trace");
    if (tr->width() != sig.size()) {
      throw Error(Errc::invalid_argument,
                  "trace '" + tr->id() + "' does not match the signature width");
    }
    for (std::size_t t = 0; t < tr->size(); ++t) {
      for (VarIndex v = 0; v < sig.size(); ++v) {
        if (!sig.variable(v).contains(tr->at(t, v))) {
          throw Error(Errc::out_of_domain, "trace '" + tr->id() + "' step " +
                                               std::to_string(t) + ": '" +
                                               sig.variable(v).name + "' outside its domain");
        }
      }
    }
  }
  index_ids();
}

TraceLog::TraceLog(Signature signature, std::vector<Trace> traces)
    : TraceLog(std::make_shared<const Signature>(std::move(signature)), [&] {
        std::vector<std::shared_ptr<const Trace>> shared;
        shared.reserve(traces.size());
        for (auto& t : traces) shared.push_back(std::make_shared<const Trace>(std::move(t)));
        return shared;
      }()) {}

TraceLog::TraceLog(Unchecked, std::shared_ptr<const Signature> signature,
                   std::vector<std::shared_ptr<const Trace>> traces)
    : signature_(std::move(signature)), traces_(std::move(traces)) {
  index_ids();
}

void TraceLog::index_ids() {
  by_id_.reserve(traces_.size());
  for (std::size_t i = 0; i < traces_.size(); ++i) {
    if (!by_id_.emplace(traces_[i]->id(), i).second) {
      throw Error(Errc::duplicate_name, "duplicate trace id '" + traces_[i]->id() + "'");
    }
  }
}

std::optional<std::size_t> TraceLog::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

TraceLog TraceLog::subset(std::span<const std::size_t> indices) const {
  std::vector<std::shared_ptr<const Trace>> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) picked.push_back(traces_.at(i));
  return TraceLog(Unchecked{}, signature_, std::move(picked));
}

TraceLog TraceLog::prefix(std::size_t n) const {
  n = std::min(n, traces_.size());
  return TraceLog(Unchecked{}, signature_,
                  std::vector<std::shared_ptr<const Trace>>(traces_.begin(),
                                                            traces_.begin() + n));
}

// ---------------------------------------------------------------------------
// Sidecar

Signature parse_signature(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t line = line_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(Errc::parse, "signature line " + std::to_string(line) + ": " + e.what(), line);
  }
  if (!doc.is_object()) throw Error(Errc::parse, "signature: expected a JSON object");

  auto version = doc.find("format_version");
  if (version == doc.end() || !version->is_number_integer()) {
    throw field_error(Errc::parse, "format_version", "missing or not an integer");
  }
  if (version->get<int>() != kFormatVersion) {
    throw Error(Errc::unsupported_version,
                "format_version " + version->dump() + " is not supported");
  }

  auto vars_it = doc.find("variables");
  if (vars_it == doc.end() || !vars_it->is_array()) {
    throw field_error(Errc::parse, "variables", "missing or not an array");
  }
  std::vector<VariableDecl> vars;
  for (std::size_t i = 0; i < vars_it->size(); ++i) {
    const json& entry = (*vars_it)[i];
    const std::string where = "variables[" + std::to_string(i) + "]";
    if (!entry.is_object()) throw field_error(Errc::parse, where, "expected an object");

    VariableDecl decl;
    auto name = entry.find("name");
    if (name == entry.end() || !name->is_string()) {
      throw field_error(Errc::parse, where + ".name", "missing or not a string");
    }
    decl.name = name->get<std::string>();

    auto kind = entry.find("kind");
    if (kind == entry.end() || !kind->is_string()) {
      throw field_error(Errc::parse, where + ".kind", "missing or not a string");
    }
    if (*kind == "endogenous") {
      decl.kind = VariableKind::endogenous;
    } else if (*kind == "exogenous") {
      decl.kind = VariableKind::exogenous;
    } else {
      throw field_error(Errc::parse, where + ".kind", "expected endogenous or exogenous");
    }

    auto domain = entry.find("domain");
    if (domain == entry.end() || !domain->is_object()) {
      throw field_error(Errc::malformed_domain, where + ".domain", "missing or not an object");
    }
    const bool has_values = domain->contains("values");
    const bool has_bounds = domain->contains("lo") || domain->contains("hi");
    if (has_values == has_bounds) {
      throw field_error(Errc::malformed_domain, where + ".domain",
                        "give either {lo, hi} or {values}");
    }
    if (has_values) {
      const json& values = (*domain)["values"];
      if (!values.is_array()) {
        throw field_error(Errc::malformed_domain, where + ".domain.values", "not an array");
      }
      DiscreteDomain d;
      for (const json& v : values) {
        if (v.is_string()) {
          d.values.push_back(canonical_token(v.get<std::string>()));
        } else if (v.is_number()) {
          d.values.push_back(canonical_token(v.dump()));
        } else {
          throw field_error(Errc::malformed_domain, where + ".domain.values",
                            "values must be numbers or strings");
        }
      }
      decl.domain = std::move(d);
    } else {
      const json* lo = domain->contains("lo") ? &(*domain)["lo"] : nullptr;
      const json* hi = domain->contains("hi") ? &(*domain)["hi"] : nullptr;
      if (lo == nullptr || hi == nullptr || !lo->is_number() || !hi->is_number()) {
        throw field_error(Errc::malformed_domain, where + ".domain", "lo and hi must be numbers");
      }
      decl.domain = ContinuousDomain{lo->get<double>(), hi->get<double>()};
    }

    auto tol = entry.find("tolerance");
    if (tol != entry.end()) {
      if (!tol->is_number()) {
        throw field_error(Errc::parse, where + ".tolerance", "not a number");
      }
      decl.tolerance = tol->get<double>();
    } else {
      decl.tolerance = decl.discrete() ? 0.0 : kDefaultTolerance;
    }
    vars.push_back(std::move(decl));
  }

  auto read_edges = [&](const char* key) {
    std::vector<Edge> edges;
    auto it = doc.find(key);
    if (it == doc.end()) return edges;
    if (!it->is_array()) throw field_error(Errc::parse, key, "not an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& e = (*it)[i];
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
        throw field_error(Errc::parse, std::string(key) + "[" + std::to_string(i) + "]",
                          "expected [parent, child]");
      }
      edges.push_back({e[0].get<std::string>(), e[1].get<std::string>()});
    }
    return edges;
  };
  auto edges = read_edges("edges");
  auto instant = read_edges("instant_edges");
  return Signature(std::move(vars), std::move(edges), std::move(instant));
}

std::string serialize_signature(const Signature& signature) {
  json doc;
  doc["format_version"] = kFormatVersion;
  json vars = json::array();
  for (const auto& v : signature.variables()) {
    json entry;
    entry["name"] = v.name;
    entry["kind"] = v.endogenous() ? "endogenous" : "exogenous";
    if (v.discrete()) {
      json values = json::array();
      for (const auto& token : v.discrete_domain().values) {
        if (auto x = parse_real(token)) {
          double integral = 0.0;
          if (std::modf(*x, &integral) == 0.0) {
            values.push_back(static_cast<long long>(integral));
          } else {
            values.push_back(*x);
          }
        } else {
          values.push_back(token);
        }
      }
      entry["domain"] = {{"values", values}};
    } else {
      entry["domain"] = {{"lo", v.continuous_domain().lo}, {"hi", v.continuous_domain().hi}};
    }
    entry["tolerance"] = v.tolerance;
    vars.push_back(std::move(entry));
  }
  doc["variables"] = std::move(vars);
  auto edges_json = [](const std::vector<Edge>& edges) {
    json out = json::array();
    for (const auto& e : edges) out.push_back(json::array({e.parent, e.child}));
    return out;
  };
  doc["edges"] = edges_json(signature.transition_edges());
  if (!signature.instant_edges().empty()) {
    doc["instant_edges"] = edges_json(signature.instant_edges());
  }
  return doc.dump(2) + "\n";
}

Signature load_signature(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::invalid_argument, "cannot open signature file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_signature(buffer.str());
}

// ---------------------------------------------------------------------------
// CSV

TraceLog parse_trace_log(std::istream& in, std::shared_ptr<const Signature> signature,
                         DomainPolicy policy) {
  if (!signature) throw Error(Errc::invalid_argument, "trace log needs a signature");
  const Signature& sig = *signature;
  const std::size_t width = sig.size();

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t id_col = 0;
  std::size_t step_col = 0;
  std::vector<std::optional<VarIndex>> column_var;

  struct Row {
    std::size_t step;
    std::size_t line;
    std::vector<Value> values;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Row>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      auto colon = view.find(':');
      if (colon != std::string_view::npos && trim(view.substr(1, colon - 1)) == "format_version") {
        auto version = parse_real(trim(view.substr(colon + 1)));
        if (!version || *version != kFormatVersion) {
          throw Error(Errc::unsupported_version,
                      "line " + std::to_string(line_no) + ": unsupported format_version",
                      line_no);
        }
      }
      continue;
    }
    auto cells = split_csv(view);
    if (!have_header) {
      have_header = true;
      std::optional<std::size_t> id_at;
      std::optional<std::size_t> step_at;
      std::vector<bool> seen(width, false);
      column_var.assign(cells.size(), std::nullopt);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c] == "trace_id") {
          id_at = c;
        } else if (cells[c] == "step") {
          step_at = c;
        } else if (auto v = sig.index_of(cells[c])) {
          if (seen[*v]) {
            throw Error(Errc::duplicate_name,
                        "line " + std::to_string(line_no) + ": column '" +
                            std::string(cells[c]) + "' repeated",
                        line_no);
          }
          seen[*v] = true;
          column_var[c] = *v;
        } else {
          throw Error(Errc::unknown_column,
                      "line " + std::to_string(line_no) + ": column '" +
                          std::string(cells[c]) + "' is not a signature variable",
                      line_no);
        }
      }
      if (!id_at || !step_at) {
        throw Error(Errc::missing_column,
                    "line " + std::to_string(line_no) + ": header needs trace_id and step",
                    line_no);
      }
      for (VarIndex v = 0; v < width; ++v) {
        if (!seen[v]) {
          throw Error(Errc::missing_column,
                      "line " + std::to_string(line_no) + ": missing column '" +
                          sig.variable(v).name + "'",
                      line_no);
        }
      }
      id_col = *id_at;
      step_col = *step_at;
      continue;
    }

    auto where = [&] { return "line " + std::to_string(line_no); };
    if (cells.size() != column_var.size()) {
      throw Error(Errc::parse,
                  where() + ": expected " + std::to_string(column_var.size()) + " fields, got " +
                      std::to_string(cells.size()),
                  line_no);
    }
    std::string id(cells[id_col]);
    if (id.empty()) throw Error(Errc::parse, where() + ": empty trace_id", line_no);
    std::size_t step = 0;
    {
      auto s = cells[step_col];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), step);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(Errc::parse, where() + ": step '" + std::string(s) + "' is not an integer",
                    line_no);
      }
    }
    std::vector<Value> values(width);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!column_var[c]) continue;
      const VarIndex v = *column_var[c];
      const VariableDecl& decl = sig.variable(v);
      if (decl.discrete()) {
        auto token = decl.token_of(cells[c]);
        if (!token) {
          throw Error(Errc::out_of_domain,
                      where() + ": '" + std::string(cells[c]) + "' is not in the domain of '" +
                          decl.name + "'",
                      line_no);
        }
        values[v] = *token;
      } else {
        auto x = parse_real(cells[c]);
        if (!x || !std::isfinite(*x)) {
          throw Error(Errc::parse,
                      where() + ": '" + std::string(cells[c]) + "' is not a number for '" +
                          decl.name + "'",
                      line_no);
        }
        const auto& d = decl.continuous_domain();
        if (*x < d.lo || *x > d.hi) {
          if (policy == DomainPolicy::strict) {
            throw Error(Errc::out_of_domain,
                        where() + ": " + std::string(cells[c]) + " outside [" +
                            format_real(d.lo) + ", " + format_real(d.hi) + "] for '" +
                            decl.name + "'",
                        line_no);
          }
          *x = std::clamp(*x, d.lo, d.hi);
        }
        values[v] = *x;
      }
    }
    auto [it, inserted] = rows.try_emplace(id);
    if (inserted) order.push_back(id);
    it->second.push_back(Row{step, line_no, std::move(values)});
  }
  if (!have_header) throw Error(Errc::missing_column, "trace log has no header", line_no);

  std::vector<std::shared_ptr<const Trace>> traces;
  traces.reserve(order.size());
  for (const auto& id : order) {
    auto& group = rows[id];
    std::stable_sort(group.begin(), group.end(),
                     [](const Row& a, const Row& b) { return a.step < b.step; });
    std::vector<Value> cells;
    cells.reserve(group.size() * width);
    for (std::size_t k = 0; k < group.size(); ++k) {
      if (group[k].step != k) {
        const bool dup = k > 0 && group[k].step == group[k - 1].step;
        throw Error(dup ? Errc::duplicate_step : Errc::non_contiguous_steps,
                    "trace '" + id + "': " +
                        (dup ? "repeated step " + std::to_string(group[k].step)
                             : "expected step " + std::to_string(k) + ", found " +
                                   std::to_string(group[k].step)),
                    group[k].line);
      }
      cells.insert(cells.end(), group[k].values.begin(), group[k].values.end());
    }
    traces.push_back(std::make_shared<const Trace>(id, width, std::move(cells)));
  }
  return TraceLog(std::move(signature), std::move(traces));
}

TraceLog parse_trace_log(std::string_view text, std::shared_ptr<const Signature> signature,
                         DomainPolicy policy) {
  std::istringstream in{std::string(text)};
  return parse_trace_log(in, std::move(signature), policy);
}

TraceLog load_trace_log(const std::string& path, std::shared_ptr<const Signature> signature,
                        DomainPolicy policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::invalid_argument, "cannot open trace log '" + path + "'");
  return parse_trace_log(in, std::move(signature), policy);
}

void write_trace_log(std::ostream& out, const TraceLog& log) {
  const Signature& sig = log.signature();
  out << "# format_version: " << kFormatVersion << '\n';
  out << "trace_id,step";
  for (const auto& v : sig.variables()) out << ',' << v.name;
  out << '\n';
  std::string row;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const Trace& tr = log[i];
    for (std::size_t t = 0; t < tr.size(); ++t) {
      row.clear();
      row += tr.id();
      row += ',';
      row += std::to_string(t);
      for (VarIndex v = 0; v < sig.size(); ++v) {
        row += ',';
        row += sig.variable(v).format(tr.at(t, v));
      }
      row += '\n';
      out << row;
    }
  }
}

std::string serialize_trace_log(const TraceLog& log) {
  std::ostringstream out;
  write_trace_log(out, log);
  return out.str();
}

// ---------------------------------------------------------------------------
// Distance and number formatting

double state_distance(const Signature& signature, StateView a, StateView b,
                      std::span<const VarIndex> vars) {
  double sum = 0.0;
  for (VarIndex v : vars) {
    if (v >= signature.size()) {
      throw Error(Errc::unknown_variable, "variable index out of range");
    }
    const VariableDecl& decl = signature.variable(v);
    if (decl.discrete()) {
      throw Error(Errc::discrete_variable,
                  "'" + decl.name + "' is discrete and has no distance");
    }
    if (!decl.endogenous()) {
      throw Error(Errc::invalid_argument, "'" + decl.name + "' is exogenous");
    }
    const double width = decl.continuous_domain().width();
    if (width <= 0.0) continue;
    const double d = (std::get<double>(a[v]) - std::get<double>(b[v])) / width;
    sum += d * d;
  }
  return std::sqrt(sum);
}

double state_distance(const Signature& signature, StateView a, StateView b,
                      const std::vector<std::string>& vars) {
  std::vector<VarIndex> idx;
  idx.reserve(vars.size());
  for (const auto& n : vars) idx.push_back(signature.require(n));
  return state_distance(signature, a, b, idx);
}

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::optional<double> parse_real(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return x;
}

}  // namespace tracecause
