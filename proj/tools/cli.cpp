#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tracecause/engine.hpp"
#include "tracecause/error.hpp"
#include "tracecause/formula.hpp"
#include "tracecause/generators.hpp"
#include "tracecause/report.hpp"
#include "tracecause/trace_model.hpp"

namespace tracecause::cli {
namespace {

struct InputError {
  std::string message;
};

// Options shared by analyze and bench.
struct AnalysisOptions {
  std::string log_path;
  std::string signature_path;
  std::string effect;
  std::vector<std::string> cause_vars;
  double alpha = 0.1;
  double beta = 0.05;
  std::uint64_t seed = 0;
  std::size_t max_conjuncts = 1;
  bool same_context = true;
  bool equiv_prefix = false;
  bool clamp = false;
  std::size_t max_outer = 16;
  std::size_t max_inner = 0;
  long long timeout_ms = -1;
};

void add_analysis_options(CLI::App& app, AnalysisOptions& o) {
  app.add_option("--log", o.log_path, "Trace log CSV")->required();
  app.add_option("--signature", o.signature_path, "Signature JSON sidecar")->required();
  app.add_option("--effect", o.effect, "Effect formula, e.g. \"pos(n) != 0.6\"")->required();
  app.add_option("--cause-vars", o.cause_vars, "Comma-separated cause variables")
      ->required()
      ->delimiter(',');
  app.add_option("--alpha", o.alpha, "Initial sampled fraction of traces, in (0, 1]")
      ->capture_default_str();
  app.add_option("--beta", o.beta, "Merge grid side, in normalized units (0 = no merging)")
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Sampling seed")->capture_default_str();
  app.add_option("--max-conjuncts", o.max_conjuncts, "Largest cause conjunction")
      ->capture_default_str();
  app.add_flag("--same-context,!--no-same-context", o.same_context,
               "Counterfactual must share the witness's exogenous values (default on)");
  app.add_flag("--equiv-prefix", o.equiv_prefix,
               "Compare traces only up to the last step the cause mentions");
  app.add_flag("--clamp", o.clamp, "Clamp out-of-domain continuous values instead of failing");
  app.add_option("--max-outer", o.max_outer, "Cap on sampling rounds")->capture_default_str();
  app.add_option("--max-inner", o.max_inner, "Cap on model refinements per candidate (0 = states)")
      ->capture_default_str();
}

struct Loaded {
  TraceLog log;
  Formula effect;
  EngineConfig cfg;
};

void print_caret(std::ostream& err, const std::string& text, std::size_t at) {
  err << "  " << text << "\n  " << std::string(std::min(at, text.size()), ' ') << "^\n";
}

Loaded load(const AnalysisOptions& o, std::ostream& err) {
  auto sig = std::make_shared<const Signature>(load_signature(o.signature_path));
  TraceLog log = load_trace_log(o.log_path, sig,
                                o.clamp ? DomainPolicy::clamp : DomainPolicy::strict);
  std::optional<Formula> effect;
  try {
    effect = parse_formula(o.effect, *sig);
  } catch (const Error& e) {
    err << "error: effect formula: " << e.what() << "\n";
    if (e.location()) print_caret(err, o.effect, *e.location());
    throw InputError{};
  }
  EngineConfig cfg;
  cfg.alpha0 = o.alpha;
  cfg.beta = o.beta;
  cfg.seed = o.seed;
  cfg.max_conjuncts = o.max_conjuncts;
  cfg.max_outer_iters = o.max_outer;
  cfg.max_inner_iters = o.max_inner;
  cfg.check.same_context = o.same_context;
  cfg.check.equiv_prefix = o.equiv_prefix;
  cfg.cause_vars = sig->resolve(o.cause_vars);
  if (o.timeout_ms >= 0) cfg.timeout = std::chrono::milliseconds(o.timeout_ms);
  validate(cfg, *sig);
  return Loaded{std::move(log), std::move(*effect), std::move(cfg)};
}

Mode mode_of(const std::string& text) {
  auto m = parse_mode(text);
  if (!m) {
    throw InputError{"unknown mode '" + text +
                     "' (expected direct_full, direct_abs, backend_full or backend_abs)"};
  }
  return *m;
}

int analyze(const AnalysisOptions& o, const std::string& mode, const std::string& out_path,
            std::ostream& out, std::ostream& err) {
  Loaded in = load(o, err);
  in.cfg.mode = mode_of(mode);
  const CauseReport report = find_actual_cause(in.log, in.effect, in.cfg);

  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw InputError{"cannot write report '" + out_path + "'"};
  file << report_json(report, in.log, in.cfg.cause_vars);
  file.close();

  if (report.found()) {
    out << "cause: " << report.cause->to_string() << "\n";
    out << "witness: " << report.witness << "\n";
    out << "counterfactual: " << report.counterfactual << "\n";
    if (report.verification) {
      const Verification& v = *report.verification;
      out << "verification: AC1 " << (v.ac1 ? "ok" : "FAILED") << ", AC2(a) "
          << (v.ac2a ? "ok" : "FAILED") << ", AC2(b) " << (v.ac2b ? "ok" : "FAILED") << "\n";
    }
  } else {
    out << "no cause found (" << to_string(*report.reason) << ")\n";
  }
  out << "mode: " << to_string(report.mode) << ", rounds: " << report.stats.outer_iters
      << ", model refinements: " << report.stats.inner_iters
      << ", candidates: " << report.stats.candidates_tried << "\n";
  out << "report: " << out_path << "\n";
  return report.found() ? kExitCause : kExitNoCause;
}

struct GenerateOptions {
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::size_t horizon = 100;
  double g = 0.0025;
  std::string order = "position-first";
  std::string out_dir = ".";
};

int generate(const GenerateOptions& o, std::ostream& out, std::ostream& err) {
  if (o.n < 1) throw InputError{"--n must be at least 1"};
  GeneratorConfig config;
  config.n = o.n;
  config.seed = o.seed;
  config.params.horizon = o.horizon;
  config.params.g = o.g;
  if (o.order == "position-first") {
    config.params.order = UpdateOrder::position_first;
  } else if (o.order == "velocity-first") {
    config.params.order = UpdateOrder::velocity_first;
  } else {
    throw InputError{"unknown update order '" + o.order +
                     "' (expected position-first or velocity-first)"};
  }
  const GeneratedLog g = generate_log(config);

  std::error_code ec;
  std::filesystem::create_directories(o.out_dir, ec);
  if (ec) throw InputError{"cannot create directory '" + o.out_dir + "': " + ec.message()};
  const auto dir = std::filesystem::path(o.out_dir);
  {
    std::ofstream f(dir / "log.csv", std::ios::binary);
    if (!f) throw InputError{"cannot write " + (dir / "log.csv").string()};
    write_trace_log(f, g.log);
  }
  {
    std::ofstream f(dir / "signature.json", std::ios::binary);
    if (!f) throw InputError{"cannot write " + (dir / "signature.json").string()};
    f << serialize_signature(*g.signature);
  }
  out << "traces: " << g.log.size() << "\n";
  out << "successes: " << g.successes << "\n";
  out << "success rate: " << format_real(g.success_rate) << "\n";
  out << "effect: " << failure_effect(config.params) << "\n";
  out << "wrote: " << (dir / "log.csv").string() << ", " << (dir / "signature.json").string()
      << "\n";
  if (g.warning) err << "warning: " << *g.warning << "\n";
  return 0;
}

struct BenchOptions {
  std::vector<std::size_t> sizes;
  std::vector<std::string> modes;
  std::vector<double> alphas;
  std::string mode = "direct_abs";
  std::size_t repeats = 1;
  std::string out_path;
};

int bench(const AnalysisOptions& a, const BenchOptions& b, std::ostream& out, std::ostream& err) {
  Loaded in = load(a, err);
  std::vector<BenchRow> rows;
  if (!b.alphas.empty()) {
    in.cfg.mode = mode_of(b.mode);
    for (double alpha : b.alphas) {
      if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError{"alphas must lie in (0, 1]"};
    }
    rows = bench_alphas(in.log, in.effect, in.cfg, b.alphas, b.repeats);
  } else {
    std::vector<Mode> modes;
    for (const auto& m : b.modes) modes.push_back(mode_of(m));
    if (modes.empty()) {
      modes = {Mode::direct_full, Mode::direct_abs, Mode::backend_full, Mode::backend_abs};
    }
    std::vector<std::size_t> sizes = b.sizes;
    if (sizes.empty()) sizes.push_back(in.log.size());
    rows = bench_modes(in.log, in.effect, in.cfg, sizes, modes, b.repeats);
  }
  if (b.out_path.empty()) {
    write_bench_csv(out, rows);
  } else {
    std::ofstream f(b.out_path, std::ios::binary);
    if (!f) throw InputError{"cannot write '" + b.out_path + "'"};
    write_bench_csv(f, rows);
    out << "rows: " << rows.size() << "\nwrote: " << b.out_path << "\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Find actual causes of an effect in execution trace logs", "tracecause"};
  app.require_subcommand(1);

  AnalysisOptions analyze_opts;
  std::string analyze_mode = "direct_abs";
  std::string analyze_out = "./report.json";
  auto* analyze_cmd = app.add_subcommand("analyze", "Search a log for an actual cause");
  add_analysis_options(*analyze_cmd, analyze_opts);
  analyze_cmd->add_option("--mode", analyze_mode, "direct_full|direct_abs|backend_full|backend_abs")
      ->capture_default_str();
  analyze_cmd->add_option("--out", analyze_out, "JSON report path")->capture_default_str();
  analyze_cmd->add_option("--timeout-ms", analyze_opts.timeout_ms, "Time budget (default none)");

  GenerateOptions gen_opts;
  auto* generate_cmd = app.add_subcommand("generate", "Generate benchmark logs");
  generate_cmd->require_subcommand(1);
  auto* car_cmd = generate_cmd->add_subcommand("mountain-car", "Mountain car with scripted policies");
  car_cmd->add_option("--n", gen_opts.n, "Number of traces")->capture_default_str();
  car_cmd->add_option("--seed", gen_opts.seed, "Seed for initial states")->capture_default_str();
  car_cmd->add_option("--horizon", gen_opts.horizon, "Maximum steps per trace")
      ->capture_default_str();
  car_cmd->add_option("--g", gen_opts.g, "Gravity coefficient")->capture_default_str();
  car_cmd->add_option("--update-order", gen_opts.order, "position-first|velocity-first")
      ->capture_default_str();
  car_cmd->add_option("--out", gen_opts.out_dir, "Output directory")->capture_default_str();

  AnalysisOptions bench_analysis;
  BenchOptions bench_opts;
  auto* bench_cmd = app.add_subcommand("bench", "Time the search modes over log prefixes");
  add_analysis_options(*bench_cmd, bench_analysis);
  bench_cmd->add_option("--sizes", bench_opts.sizes, "Comma-separated prefix sizes (default: all)")
      ->delimiter(',');
  bench_cmd->add_option("--modes", bench_opts.modes, "Comma-separated modes (default: all four)")
      ->delimiter(',');
  bench_cmd->add_option("--timeout-ms", bench_analysis.timeout_ms, "Time budget per cell");
  bench_cmd->add_option("--alphas", bench_opts.alphas,
                        "Comma-separated alpha sweep on the whole log, using --mode")
      ->delimiter(',');
  bench_cmd->add_option("--mode", bench_opts.mode, "Mode for --alphas")->capture_default_str();
  bench_cmd->add_option("--repeats", bench_opts.repeats, "Runs per cell; the median is reported")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench_opts.out_path, "CSV path (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (*analyze_cmd) return analyze(analyze_opts, analyze_mode, analyze_out, out, err);
    if (*car_cmd) return generate(gen_opts, out, err);
    if (*bench_cmd) return bench(bench_analysis, bench_opts, out, err);
  } catch (const InputError& e) {
    if (!e.message.empty()) err << "error: " << e.message << "\n";
    return kExitInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << " [" << to_string(e.code()) << "]\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace tracecause::cli
