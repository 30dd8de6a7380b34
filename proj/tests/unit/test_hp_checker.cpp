#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tracecause/hp_checker.hpp"

using namespace tracecause;
using fixtures::error_of;

namespace {

struct Row {
  double pos;
  double vel;
  int action;
};

// Car trace with context pos0 = 0, vel0 = 0.02, g = 0.0025.
std::shared_ptr<const Trace> car_trace(const std::string& id, const std::vector<Row>& rows) {
  std::vector<Value> cells;
  for (const Row& r : rows) {
    cells.insert(cells.end(), {r.pos, r.vel, Token{r.action + 1}, 0.0, 0.02, 0.0025});
  }
  return std::make_shared<const Trace>(id, 6, std::move(cells));
}

TraceLog car_log(std::vector<std::shared_ptr<const Trace>> traces) {
  return TraceLog(fixtures::example_signature(), std::move(traces));
}

const std::vector<Row> kTau0{{0, 0.02, 1}, {0.018, 0.018, 1}, {0.12, 0, 1}, {0.11, -0.001, 1}};
const std::vector<Row> kTau1{{0, 0.02, -1}, {-0.01, -0.01, -1}, {0.58, 0.051, 1}, {0.6, 0.052, 1}};

CauseCandidate cause(const Signature& sig, const std::string& text) {
  return make_candidate(sig, {parse_formula(text, sig).event()});
}

}  // namespace

TEST_CASE("partition for action") {
  const auto sig = fixtures::example_signature();
  const Partition p = derive_partition(*sig, std::vector<std::string>{"action"});
  CHECK(p.x == VarSet{2});
  CHECK(p.z == VarSet{0, 1, 2});
  CHECK(p.w.empty());
  const Partition all = derive_partition(*sig, std::vector<std::string>{"pos", "vel", "action"});
  CHECK(all.w.empty());
  CHECK(error_of([&] { derive_partition(*sig, std::vector<std::string>{"g"}); }) ==
        Errc::invalid_argument);
  CHECK(error_of([&] { derive_partition(*sig, std::vector<std::string>{"zzz"}); }) ==
        Errc::unknown_variable);
  CHECK(error_of([&] { derive_partition(*sig, VarSet{}); }) == Errc::invalid_argument);
}

TEST_CASE("an isolated variable lands in W") {
  std::vector<VariableDecl> vars = fixtures::example_signature()->variables();
  vars.push_back({"s", VariableKind::endogenous, DiscreteDomain{{"0", "1"}}, 0.0});
  const Signature sig(vars, fixtures::example_signature()->transition_edges());
  const Partition p = derive_partition(sig, std::vector<std::string>{"action"});
  const Partition expected = oracle::partition(sig, {"action"});
  CHECK(p.z == expected.z);
  CHECK(p.w == expected.w);
  CHECK(p.w == VarSet{6});
}

TEST_CASE("trace equivalence on the three traces") {
  const TraceLog log = fixtures::example_log();
  const auto& sig = log.signature();
  const VarSet z{0, 1, 2};
  CHECK(trace_equiv(log[0], log[2], z, sig));
  CHECK_FALSE(trace_equiv(log[0], log[1], z, sig));
  for (std::size_t i = 0; i < 3; ++i) CHECK(trace_equiv(log[i], log[i], z, sig));
  CHECK(trace_equiv(log[0], log[1], {}, sig));
  CHECK(trace_equiv(log[0], log[1], VarSet{3, 4, 5}, sig));
  // Prefix comparison through step 0 sees only the differing action.
  CHECK_FALSE(trace_equiv(log[0], log[1], z, sig, 0));
  CHECK(trace_equiv(log[0], log[1], VarSet{0, 1}, sig, 0));
}

TEST_CASE("unequal lengths are never equivalent") {
  const TraceLog log = car_log({car_trace("a", kTau0), car_trace("b", {kTau0[0], kTau0[1]})});
  CHECK_FALSE(trace_equiv(log[0], log[1], VarSet{0}, log.signature()));
  CHECK(trace_equiv(log[0], log[1], VarSet{0}, log.signature(), 1));
}

TEST_CASE("AC1 on the three traces") {
  const TraceLog log = fixtures::example_log();
  const auto& sig = log.signature();
  const Formula fail = parse_formula(fixtures::kFailure, sig);
  const auto c = cause(sig, "action(0) = 1");
  CHECK(check_ac1(log, c, fail) == 0u);
  CHECK(check_ac1(log, c, fail, 1) == 2u);
  const Formula until = Formula::conjunction({c.formula, fail});
  CHECK(holds_until(Formula::negation(fail), until, log[0]));
  CHECK_FALSE(check_ac1(log.prefix(0), c, fail));
  CHECK_FALSE(check_ac1(log, cause(sig, "action(0) = -1"), fail));
}

TEST_CASE("AC1 when the effect holds from step 0") {
  // Effect pos >= 0 holds at step 0 of both traces.
  const TraceLog log = car_log({car_trace("a", {{0, 0, 0}, {0.1, 0, 1}}),
                                car_trace("b", {{0.2, 0, 0}, {0.3, 0, 1}})});
  const auto& sig = log.signature();
  const Formula effect = parse_formula("pos(*) >= 0", sig);
  // A per-step cause that first holds at step 1 comes too late.
  const Formula late = parse_formula("action(*) = 1", sig);
  const CauseCandidate per_step{late, derive_partition(sig, VarSet{2})};
  CHECK_FALSE(check_ac1(log, per_step, effect));
  CHECK_FALSE(oracle::ac1(log, late, effect));
  // A fixed-index cause anchors at step 0, where the prefix is empty.
  const auto fixed = cause(sig, "action(1) = 1");
  CHECK(check_ac1(log, fixed, effect) == 0u);
  CHECK(oracle::ac1(log, fixed.formula, effect) == 0u);
}

TEST_CASE("AC2(a) on the three traces") {
  const TraceLog log = fixtures::example_log();
  const auto& sig = log.signature();
  const Formula fail = parse_formula(fixtures::kFailure, sig);
  const auto c = cause(sig, "action(0) = 1");
  CHECK(check_ac2a(log, log[0], c, fail) == 1u);
  const TraceLog alone = log.prefix(1);
  CHECK_FALSE(check_ac2a(alone, alone[0], c, fail));
}

TEST_CASE("AC2(a) rejects a success that still has the cause") {
  std::vector<Row> success_with_cause = kTau1;
  success_with_cause[0].action = 1;
  const TraceLog log = car_log({car_trace("tau0", kTau0), car_trace("s", success_with_cause),
                                car_trace("tau1", kTau1)});
  const auto& sig = log.signature();
  const Formula fail = parse_formula(fixtures::kFailure, sig);
  const auto c = cause(sig, "action(0) = 1");
  CHECK_FALSE(satisfies_counterfactual(log[1], c.formula, fail));
  CHECK(check_ac2a(log, log[0], c, fail) == 2u);
  CHECK(oracle::ac2a(log, log[0], c.formula, fail, c.partition, true) == 2u);
}

TEST_CASE("AC2(a) context filter") {
  std::vector<Value> cells;
  for (const Row& r : kTau1) cells.insert(cells.end(), {r.pos, r.vel, Token{r.action + 1}, -0.5, 0.0, 0.0025});
  const TraceLog log = car_log({car_trace("tau0", kTau0),
                                std::make_shared<const Trace>("other", 6, cells)});
  const auto& sig = log.signature();
  const Formula fail = parse_formula(fixtures::kFailure, sig);
  const auto c = cause(sig, "action(0) = 1");
  CHECK_FALSE(check_ac2a(log, log[0], c, fail));
  CHECK(check_ac2a(log, log[0], c, fail, CheckOptions{false, false}) == 1u);
}

TEST_CASE("AC2(b) on the three traces") {
  const TraceLog log = fixtures::example_log();
  const auto& sig = log.signature();
  const Formula fail = parse_formula(fixtures::kFailure, sig);
  const auto c = cause(sig, "action(0) = 1");
  const Ac2bResult r = check_ac2b(log, log[0], c, fail);
  CHECK(r.ok());
  CHECK(r.examined == 3);
}

TEST_CASE("AC2(b) finds a prefix-equivalent success") {
  // tau3 agrees with tau0 through the cause step and then reaches the goal.
  std::vector<Row> tau3 = kTau0;
  tau3[1] = {0.02, 0.03, 1};
  tau3[2] = {0.3, 0.05, 1};
  tau3[3] = {0.6, 0.06, 1};
  const TraceLog log = car_log({car_trace("tau0", kTau0), car_trace("tau1", kTau1),
                                car_trace("tau2", kTau0), car_trace("tau3", tau3)});
  const auto& sig = log.signature();
  const Formula fail = parse_formula(fixtures::kFailure, sig);
  const auto c = cause(sig, "action(0) = 1");
  const CheckOptions prefix{true, true};
  const Ac2bResult r = check_ac2b(log, log[0], c, fail, prefix);
  const auto expected = oracle::ac2b(log, log[0], c.formula, fail, c.partition, 0);
  CHECK(expected == 3u);
  CHECK(r.counterexample == expected);
  // Whole-trace comparison keeps tau3 out of the quantifier.
  CHECK(check_ac2b(log, log[0], c, fail).ok());
}

TEST_CASE("AC2(b) is vacuous without Z-equivalent traces") {
  const TraceLog log = car_log({car_trace("tau0", kTau0), car_trace("tau1", kTau1)});
  const auto& sig = log.signature();
  const Formula fail = parse_formula(fixtures::kFailure, sig);
  CHECK(check_ac2b(log, log[0], cause(sig, "action(0) = 1"), fail).ok());
}

TEST_CASE("candidate order") {
  const TraceLog log = fixtures::example_log();
  const auto& sig = log.signature();
  const Formula fail = parse_formula(fixtures::kFailure, sig);
  const auto all = enumerate_candidates(log, fail, VarSet{2});
  REQUIRE(all.size() == 4);
  CHECK(all[0].to_string() == "action(0) = 1");
  CHECK(all[1].to_string() == "action(1) = 1");
  CHECK(all[3].to_string() == "action(3) = 1");
  CHECK(all[0].partition.z == VarSet{0, 1, 2});
}

TEST_CASE("singletons come before pairs") {
  const TraceLog log = car_log({car_trace("a", {{0, 0, -1}, {0, 0, 1}}),
                                car_trace("b", {{0, 0, 1}, {0, 0, -1}})});
  const Formula fail = parse_formula(fixtures::kFailure, log.signature());
  const auto all = enumerate_candidates(log, fail, VarSet{2}, 2);
  std::vector<std::string> text;
  for (const auto& c : all) text.push_back(c.to_string());
  CHECK(text == std::vector<std::string>{"action(0) = -1", "action(0) = 1", "action(1) = 1",
                                         "action(1) = -1", "action(0) = -1 & action(1) = 1",
                                         "action(0) = 1 & action(1) = -1"});
}

TEST_CASE("a constant cause variable yields candidates without counterfactuals") {
  std::vector<Row> success = kTau1;
  for (auto& r : success) r.action = 1;
  const TraceLog log = car_log({car_trace("f", kTau0), car_trace("s", success)});
  const auto& sig = log.signature();
  const Formula fail = parse_formula(fixtures::kFailure, sig);
  const auto all = enumerate_candidates(log, fail, VarSet{2});
  REQUIRE_FALSE(all.empty());
  for (const auto& c : all) {
    REQUIRE(check_ac1(log, c, fail) == 0u);
    CHECK_FALSE(check_ac2a(log, log[0], c, fail));
  }
}

TEST_CASE("no failing trace, no candidates") {
  const TraceLog log = car_log({car_trace("s", kTau1)});
  const Formula fail = parse_formula(fixtures::kFailure, log.signature());
  CandidateStream stream(log, fail, VarSet{2});
  CHECK(stream.failing_count() == 0);
  CHECK_FALSE(stream.next());
  CHECK(error_of([&] { CandidateStream(log, fail, VarSet{5}); }) == Errc::invalid_argument);
}
