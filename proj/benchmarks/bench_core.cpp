#include <benchmark/benchmark.h>

#include <map>

#include "tracecause/abstraction.hpp"
#include "tracecause/engine.hpp"
#include "tracecause/generators.hpp"

using namespace tracecause;

namespace {

const GeneratedLog& car_log(std::size_t n) {
  static std::map<std::size_t, GeneratedLog> logs;
  auto it = logs.find(n);
  if (it == logs.end()) {
    GeneratorConfig cfg;
    cfg.n = n;
    cfg.seed = 7;
    it = logs.emplace(n, generate_log(cfg)).first;
  }
  return it->second;
}

void BM_EvalFormula(benchmark::State& state) {
  const GeneratedLog& g = car_log(1000);
  const Formula f = parse_formula("(pos(*) > -0.5 & vel(*) >= 0) | action(*) = -1", g.log.signature());
  for (auto _ : state) {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < g.log.size(); ++k) hits += holds_eventually(f, g.log[k]);
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.log.size()));
}
BENCHMARK(BM_EvalFormula);

void BM_OverApproximate(benchmark::State& state) {
  const GeneratedLog& g = car_log(static_cast<std::size_t>(state.range(0)));
  const Signature& sig = g.log.signature();
  const Formula effect = parse_formula(failure_effect(MountainCarParams{}), sig);
  const auto c = make_candidate(sig, {parse_formula("action(0) = 1", sig).event()});
  const double beta = static_cast<double>(state.range(1)) / 100.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(over_approximate(g.log, beta, c, effect).size());
  }
}
BENCHMARK(BM_OverApproximate)->Args({1000, 1})->Args({1000, 5})->Args({4000, 5})
    ->Unit(benchmark::kMillisecond);

void BM_FindActualCause(benchmark::State& state) {
  const GeneratedLog& g = car_log(static_cast<std::size_t>(state.range(0)));
  const Formula effect = parse_formula(failure_effect(MountainCarParams{}), g.log.signature());
  EngineConfig cfg;
  cfg.mode = static_cast<Mode>(state.range(1));
  cfg.cause_vars = g.signature->resolve({"action"});
  cfg.verify = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_actual_cause(g.log, effect, cfg).found());
  }
  state.SetLabel(std::string(to_string(cfg.mode)));
}
BENCHMARK(BM_FindActualCause)
    ->ArgsProduct({{1000, 4000}, {0, 1, 2, 3}})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
