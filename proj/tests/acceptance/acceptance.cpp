// One PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "laws.hpp"
#include "tracecause/report.hpp"

#ifdef TRACECAUSE_WITH_CLI
#include "cli.hpp"
#endif

using namespace tracecause;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kWorkedExampleBudgetMs = 1000.0;
constexpr int kSoundnessLogs = 100;
constexpr double kSoundnessBudgetMs = 5 * 60 * 1000.0;
constexpr int kTemporalCases = 1000;
constexpr int kHpCases = 500;
constexpr std::size_t kLawLogSize = 1000;
constexpr std::uint64_t kLogSeed = 7;
constexpr std::size_t kBenchRepeats = 3;
constexpr double kBenchBudgetMs = 10 * 60 * 1000.0;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << " " << name << ": " << detail
            << std::endl;
  failures += !ok;
}

std::string fmt(double x, int digits = 1) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

void worked_example() {
  const auto start = Clock::now();
  const TraceLog log = fixtures::example_log();
  const Formula effect = parse_formula(fixtures::kFailure, log.signature());
  EngineConfig cfg;
  cfg.cause_vars = log.signature().resolve({"action"});
  const CauseReport r = find_actual_cause(log, effect, cfg);
  bool ok = r.found() && r.cause->to_string() == "action(0) = 1" && r.witness == "tau0" &&
            r.counterfactual == "tau1";
  if (ok) ok = verify_cause(log, *r.cause, effect).ok();
  std::string detail = r.found() ? r.cause->to_string() + " witness " + r.witness +
                                       " counterfactual " + r.counterfactual
                                 : "no cause";
#ifdef TRACECAUSE_WITH_CLI
  const auto out = std::filesystem::temp_directory_path() / "tracecause_acceptance_report.json";
  std::ostringstream cli_out, cli_err;
  const int code = cli::run({"analyze", "--log", fixtures::data_path("three_traces/log.csv"),
                             "--signature", fixtures::data_path("three_traces/signature.json"),
                             "--effect", fixtures::kFailure, "--cause-vars", "action", "--out",
                             out.string()},
                            cli_out, cli_err);
  const bool cli_ok = code == cli::kExitCause &&
                      cli_out.str().find("cause: action(0) = 1\nwitness: tau0\ncounterfactual: tau1\n"
                                         "verification: AC1 ok, AC2(a) ok, AC2(b) ok") != std::string::npos;
  ok = ok && cli_ok;
  detail += cli_ok ? ", analyze agrees" : ", analyze disagrees";
#endif
  const double ms = ms_since(start);
  ok = ok && ms < kWorkedExampleBudgetMs;
  report(1, "worked example", ok, detail + " in " + fmt(ms) + " ms");
}

void soundness() {
  const auto start = Clock::now();
  int found = 0;
  std::optional<std::string> violation;
  for (int i = 0; i < kSoundnessLogs; ++i) {
    const auto run = laws::soundness_case(1000 + static_cast<std::uint64_t>(i));
    found += run.found;
    if (run.failure && !violation) violation = run.failure;
  }
  const double ms = ms_since(start);
  const bool ok = !violation && ms < kSoundnessBudgetMs;
  report(2, "soundness", ok,
         std::to_string(kSoundnessLogs) + " logs, " + std::to_string(found) + " causes, " +
             (violation ? "violation: " + *violation : "0 violations") + ", " + fmt(ms / 1000.0) + " s");
}

void temporal() {
  fixtures::Rng rng(3);
  int bad = 0;
  std::string first;
  for (int i = 0; i < kTemporalCases; ++i) {
    if (auto f = laws::temporal_case(rng)) {
      if (bad++ == 0) first = *f;
    }
  }
  report(3, "temporal oracle", bad == 0,
         std::to_string(kTemporalCases) + " cases, " + std::to_string(bad) + " mismatches" +
             (bad ? " (" + first + ")" : ""));
}

void hp() {
  fixtures::Rng rng(4);
  int bad = 0;
  std::string first;
  for (int i = 0; i < kHpCases; ++i) {
    if (auto f = laws::hp_case(rng)) {
      if (bad++ == 0) first = *f;
    }
  }
  report(4, "HP oracle", bad == 0,
         std::to_string(kHpCases) + " cases, " + std::to_string(bad) + " mismatches" +
             (bad ? " (" + first + ")" : ""));
}

const GeneratedLog& law_log() {
  static const GeneratedLog g = [] {
    GeneratorConfig cfg;
    cfg.n = kLawLogSize;
    cfg.seed = kLogSeed;
    return generate_log(cfg);
  }();
  return g;
}

void abstraction() {
  const GeneratedLog& g = law_log();
  const Signature& sig = g.log.signature();
  const Formula effect = parse_formula(failure_effect(MountainCarParams{}), sig);
  const auto c = make_candidate(sig, {parse_formula("action(0) = 1", sig).event()});
  std::string counts;
  for (double beta : {0.0, 0.01, 0.05, 0.1}) {
    counts += (counts.empty() ? "" : "/") + std::to_string(over_approximate(g.log, beta, c, effect).size());
  }
  const auto f = laws::abstraction_laws(g.log, c, effect, kLogSeed);
  report(5, "abstraction laws", !f, "states at beta 0/0.01/0.05/0.1: " + counts + (f ? ", " + *f : ""));
}

void alpha_trend() {
  const GeneratedLog& g = law_log();
  const Formula effect = parse_formula(failure_effect(MountainCarParams{}), g.log.signature());
  EngineConfig cfg;
  cfg.mode = Mode::direct_abs;
  cfg.cause_vars = g.signature->resolve({"action"});
  cfg.seed = kLogSeed;
  const auto rows = bench_alphas(g.log, effect, cfg, {0.01, 0.05, 0.1});
  bool ok = rows.size() == 3;
  std::string detail;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t n = rows[i].outer_refinements + rows[i].inner_refinements;
    if (i > 0) {
      const std::size_t prev = rows[i - 1].outer_refinements + rows[i - 1].inner_refinements;
      ok = ok && n <= prev;
    }
    detail += (i ? ", " : "") + std::string("alpha ") + fmt(rows[i].alpha, 2) + ": " + std::to_string(n);
    ok = ok && rows[i].outcome == "action(0) = 1";
  }
  report(6, "refinements non-increasing in alpha", ok, detail);
}

void performance() {
  const auto start = Clock::now();
  GeneratorConfig gc;
  gc.n = 8000;
  gc.seed = kLogSeed;
  const GeneratedLog g = generate_log(gc);
  const Formula effect = parse_formula(failure_effect(gc.params), g.log.signature());
  EngineConfig cfg;
  cfg.cause_vars = g.signature->resolve({"action"});
  cfg.seed = kLogSeed;
  const auto rows = bench_modes(g.log, effect, cfg, {1000, 4000, 8000},
                                {Mode::direct_full, Mode::direct_abs}, kBenchRepeats);
  // rows: (1000, full), (1000, abs), (4000, full), ...
  const double full1 = rows[0].wall_ms, full8 = rows[4].wall_ms, abs8 = rows[5].wall_ms;
  const bool ordered = abs8 <= full8;
  // Superlinear: time grows faster than the eightfold size.
  const bool superlinear = full8 > 8.0 * full1;
  const double ms = ms_since(start);
  std::string detail = "direct_full ms " + fmt(rows[0].wall_ms, 2) + "/" + fmt(rows[2].wall_ms, 2) +
                       "/" + fmt(rows[4].wall_ms, 2) + ", direct_abs ms " + fmt(rows[1].wall_ms, 2) +
                       "/" + fmt(rows[3].wall_ms, 2) + "/" + fmt(rows[5].wall_ms, 2) +
                       " at 1000/4000/8000; abs<=full at 8000: " + (ordered ? "yes" : "no") +
                       "; full superlinear: " + (superlinear ? "yes" : "no") + "; " +
                       fmt(ms / 1000.0) + " s";
  report(7, "performance ordering", ordered && superlinear && ms < kBenchBudgetMs, detail);
}

void generator() {
  const GeneratedLog& g = law_log();
  const std::string text = serialize_trace_log(g.log);
  const TraceLog parsed = parse_trace_log(text, g.signature);
  GeneratorConfig cfg;
  cfg.n = kLawLogSize;
  cfg.seed = kLogSeed;
  const bool same_seed = serialize_trace_log(generate_log(cfg).log) == text;
  const bool round_trip = serialize_trace_log(parsed) == text;
  const bool band = g.success_rate > 0.0 && g.success_rate < 0.5;
  report(8, "generator", band && same_seed && round_trip,
         "success rate " + fmt(g.success_rate, 3) + ", round trip " + (round_trip ? "exact" : "differs") +
             ", same seed " + (same_seed ? "identical" : "differs"));
}

}  // namespace

int main() {
  void (*criteria[])() = {worked_example, soundness, temporal, hp,
                          abstraction,    alpha_trend, performance, generator};
  for (int i = 0; i < 8; ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(i + 1, "error", false, e.what());
    }
  }
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria passed")
            << std::endl;
  return failures ? 1 : 0;
}
