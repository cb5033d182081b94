#include "scenopt/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "scenopt/bounds.hpp"
#include "scenopt/experiments.hpp"
#include "scenopt/io.hpp"

namespace scenopt {

namespace fs = std::filesystem;

namespace {

struct Options {
  // shared
  unsigned jobs = 1;
  Tolerances tol;
  std::string out_dir;
  std::uint64_t seed = 30;

  // problem source
  std::string input;
  std::string generator;
  std::size_t m = 0;
  std::size_t d = 1;
  std::size_t n = 2;

  // bound
  std::string formula = "cascade";
  std::size_t r = 0;
  std::optional<std::size_t> zeta;
  std::optional<double> eps;
  std::optional<double> invert;
  std::optional<double> beta;
  bool max_r = false;

  // schemes
  std::optional<std::size_t> ell;
  std::optional<std::size_t> removed;
  std::string mode = "regularized";
  std::string scheme = "cascade";
  bool verify = false;

  // experiments
  std::size_t trials = 1000;
  std::size_t inner_samples = 10000;
  std::string eps_grid = "0.01:0.005:0.08";
  std::optional<double> target_bound;
};

struct Provenance {
  std::string command;
  const Options& opt;

  Json json(Json config) const {
    return {{"tool", "scenopt"},
            {"version", kVersion},
            {"command", command},
            {"seed", opt.seed},
            {"rng", RandomSource::kAlgorithm},
            {"tolerances", to_json(opt.tol)},
            {"jobs", opt.jobs},
            {"config", std::move(config)}};
  }

  std::vector<std::pair<std::string, std::string>> csv(const Json& config) const {
    return {{"tool", std::string("scenopt ") + kVersion},
            {"command", command},
            {"seed", std::to_string(opt.seed)},
            {"rng", RandomSource::kAlgorithm},
            {"tolerances", to_json(opt.tol).dump()},
            {"config", config.dump()}};
  }
};

void print(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

std::string output_dir(const Options& opt, bool required) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return required ? "." : "";
}

std::size_t require(const std::optional<std::size_t>& v, const char* name) {
  if (!v) throw InvalidInput(std::string("missing required option ") + name);
  return *v;
}

double require(const std::optional<double>& v, const char* name) {
  if (!v) throw InvalidInput(std::string("missing required option ") + name);
  return *v;
}

ScenarioProgram load_or_generate(const Options& opt) {
  if (!opt.input.empty() && !opt.generator.empty())
    throw InvalidInput("give either --input or --generator, not both");
  if (!opt.input.empty()) return load_program(opt.input);
  RandomSource rng(opt.seed);
  if (opt.generator == "analytic") return gen_analytic(opt.m, rng);
  if (opt.generator == "resource") return gen_resource(opt.d, opt.n, opt.m, rng);
  if (opt.generator.empty()) throw InvalidInput("missing --input or --generator");
  throw InvalidInput("unknown generator '" + opt.generator + "'");
}

Json source_config(const Options& opt) {
  if (!opt.input.empty()) return {{"input", opt.input}};
  return {{"generator", opt.generator}, {"m", opt.m}, {"d", opt.d}, {"n", opt.n}};
}

std::unique_ptr<ScenarioFamily> family_for(const Options& opt) {
  if (opt.generator == "analytic") return std::make_unique<AnalyticFamily>();
  if (opt.generator == "resource") return std::make_unique<ResourceFamily>(opt.d, opt.n);
  throw InvalidInput("--generator must be analytic or resource");
}

/// Removal count from --ell / --r, checked for consistency.
std::size_t removal_count(const Options& opt, std::size_t d) {
  if (opt.ell && opt.removed && *opt.ell * d != *opt.removed)
    throw InvalidInput("--ell times d must equal --r");
  if (opt.ell) return *opt.ell * d;
  if (opt.removed) return *opt.removed;
  throw InvalidInput("missing --ell or --r");
}

int cmd_bound(const Options& opt, std::ostream& out) {
  const BoundFormula formula = bound_formula_from_string(opt.formula);
  Json j{{"formula", to_string(formula)}, {"m", opt.m}, {"d", opt.d}};
  if (opt.max_r) {
    const double eps = require(opt.eps, "--eps");
    const double beta = require(opt.beta, "--beta");
    RemovalCount c = removal_counts(opt.m, opt.d, eps, beta, formula);
    j["epsilon"] = eps;
    j["beta"] = beta;
    j["max_removable"] = c.reported;
    j["max_removable_batched"] = c.batched;
    j["max_removable_strict"] = c.strict;
    j["feasible"] = c.feasible;
  } else if (opt.invert) {
    EpsilonInversion inv = invert_epsilon(opt.m, opt.d, opt.r, *opt.invert, formula);
    j["r"] = opt.r;
    j["beta"] = *opt.invert;
    j["epsilon"] = inv.epsilon;
    j["at_boundary"] = inv.at_boundary;
  } else {
    const double eps = require(opt.eps, "--eps");
    BoundValue v;
    if (formula == BoundFormula::Compression && opt.zeta) {
      v = bound_compression(opt.m, *opt.zeta, eps);
      j["zeta"] = *opt.zeta;
    } else {
      v = evaluate_bound(formula, {opt.m, opt.d, opt.r, eps});
      j["r"] = opt.r;
    }
    j["epsilon"] = eps;
    j["value"] = v.value;
    j["raw"] = v.raw;
  }
  print(out, j);
  return kExitOk;
}

CsvTable stage_table(const CascadeTrace& trace) {
  CsvTable t;
  t.header = {"k", "objective", "support_size", "padding_size", "degenerate"};
  for (std::size_t j = 0; j < trace.final_x.size(); ++j) t.header.push_back("x" + std::to_string(j));
  for (const StageRecord& s : trace.stages) {
    std::vector<std::string> row{std::to_string(s.k), format_double(s.objective),
                                 std::to_string(s.support.size()),
                                 std::to_string(s.padding.size()), s.degenerate ? "1" : "0"};
    for (double v : s.minimizer) row.push_back(format_double(v));
    t.add_row(std::move(row));
  }
  return t;
}

int cmd_cascade(const Options& opt, const Provenance& prov, std::ostream& out) {
  ScenarioProgram program = load_or_generate(opt);
  const std::size_t ell = require(opt.ell, "--ell");
  const CascadeMode mode = cascade_mode_from_string(opt.mode);
  CascadeTrace trace = run_cascade(program, ell, mode, opt.tol);

  Json config = source_config(opt);
  config["ell"] = ell;
  config["mode"] = to_string(mode);
  Json j = to_json(trace);
  if (opt.verify) j["verify_compression"] = verify_compression(program, trace, opt.tol);
  j["provenance"] = prov.json(config);

  if (std::string dir = output_dir(opt, false); !dir.empty()) {
    write_text(fs::path(dir) / "cascade_trace.json", j.dump(2) + "\n");
    CsvTable t = stage_table(trace);
    t.provenance = prov.csv(config);
    write_text(fs::path(dir) / "cascade_stages.csv", t.str());
  }
  print(out, j);
  return kExitOk;
}

int cmd_greedy(const Options& opt, const Provenance& prov, std::ostream& out) {
  ScenarioProgram program = load_or_generate(opt);
  const std::size_t r = require(opt.removed, "--r");
  GreedyTrace trace = greedy_removal(program, r, opt.tol);

  Json config = source_config(opt);
  config["r"] = r;
  Json j = to_json(trace);
  j["solves_published_convention"] = greedy_solves_published_convention(r, program.dimension());
  j["provenance"] = prov.json(config);
  if (std::string dir = output_dir(opt, false); !dir.empty())
    write_text(fs::path(dir) / "greedy_trace.json", j.dump(2) + "\n");
  print(out, j);
  return kExitOk;
}

CsvTable trial_table(const OuterProbabilityEstimate& est) {
  CsvTable t;
  t.header = {"seed", "trial", "final_objective", "violation", "inner_half_width", "exceed",
              "excluded"};
  for (const TrialRecord& r : est.records) {
    t.add_row({std::to_string(r.seed), std::to_string(r.trial), format_double(r.final_objective),
               format_double(r.violation), format_double(r.inner_half_width),
               r.exceed ? "1" : "0", r.excluded ? "1" : "0"});
  }
  return t;
}

Json estimate_json(const OuterProbabilityEstimate& est) {
  return {{"epsilon", est.epsilon},
          {"trials", est.trials},
          {"excluded", est.excluded},
          {"exceed_count", est.exceed_count},
          {"estimate", est.point},
          {"half_width_95", est.half_width_95},
          {"straddle_fraction", est.straddle_fraction}};
}

void write_experiment(const std::string& dir, const std::string& name, const Json& summary,
                      CsvTable table) {
  write_text(fs::path(dir) / (name + ".json"), summary.dump(2) + "\n");
  write_text(fs::path(dir) / (name + ".csv"), table.str());
}

int cmd_analytic_tightness(const Options& opt, const Provenance& prov, std::ostream& out) {
  const std::size_t ell = require(opt.ell, "--ell");
  const double eps = require(opt.eps, "--eps");
  OuterMcConfig cfg;
  cfg.m = opt.m;
  cfg.removed = ell;
  cfg.scheme = Scheme::Cascade;
  cfg.mode = CascadeMode::FullySupported;
  cfg.epsilon = eps;
  cfg.trials = opt.trials;
  cfg.seed = opt.seed;
  cfg.jobs = opt.jobs;
  cfg.tol = opt.tol;
  OuterProbabilityEstimate est = outer_probability_mc(AnalyticFamily(), cfg);

  const double exact = analytic_violation_cdf(opt.m, ell, eps);
  Json config{{"experiment", "analytic-tightness"}, {"m", opt.m}, {"ell", ell},
              {"epsilon", eps}, {"trials", opt.trials}, {"mode", to_string(cfg.mode)}};
  Json summary = estimate_json(est);
  summary["analytic"] = exact;
  summary["bound_cascade"] = bound_cascade({opt.m, 1, ell, eps}).value;
  summary["tight"] = std::abs(est.point - exact) <= 3.0 * est.half_width_95;
  summary["provenance"] = prov.json(config);

  CsvTable t = trial_table(est);
  t.provenance = prov.csv(config);
  write_experiment(output_dir(opt, true), "analytic_tightness", summary, std::move(t));
  print(out, summary);
  return kExitOk;
}

int cmd_resource_compare(const Options& opt, const Provenance& prov, std::ostream& out) {
  const double beta = require(opt.beta, "--beta");
  const CascadeMode mode = cascade_mode_from_string(opt.mode);
  std::vector<double> grid = parse_grid(opt.eps_grid);
  RandomSource rng(opt.seed);
  ScenarioProgram program = gen_resource(opt.d, opt.n, opt.m, rng);
  std::vector<SizedComparison> rows = sized_comparison(program, grid, beta, mode, opt.tol);

  Json config{{"experiment", "resource-compare"}, {"d", opt.d}, {"n", opt.n}, {"m", opt.m},
              {"beta", beta}, {"eps_grid", opt.eps_grid}, {"mode", to_string(mode)},
              {"resources", "all ones"}};
  CsvTable t;
  t.provenance = prov.csv(config);
  t.header = {"epsilon", "cascade_reported", "cascade_strict", "cascade_removed", "cg11_strict",
              "greedy_removed", "cascade_objective", "greedy_objective", "relative_improvement",
              "cascade_stage_solves", "greedy_solves_raw", "greedy_solves_published"};
  Json table = Json::array();
  for (const SizedComparison& r : rows) {
    SolverCallCount calls = solver_call_count(r.cost, opt.d);
    t.add_row({format_double(r.epsilon), std::to_string(r.cascade_count.reported),
               std::to_string(r.cascade_count.strict), std::to_string(r.cost.cascade_removed),
               std::to_string(r.cg11_count.strict), std::to_string(r.cost.greedy_removed),
               format_double(r.cost.cascade_objective), format_double(r.cost.greedy_objective),
               format_double(r.cost.relative_improvement),
               std::to_string(calls.cascade_stage_solves), std::to_string(calls.greedy_raw),
               std::to_string(calls.greedy_published)});
    table.push_back({{"epsilon", r.epsilon},
                     {"cascade_removed", r.cost.cascade_removed},
                     {"greedy_removed", r.cost.greedy_removed},
                     {"relative_improvement", r.cost.relative_improvement}});
  }
  Json summary{{"rows", table}, {"provenance", prov.json(config)}};
  write_experiment(output_dir(opt, true), "resource_compare", summary, std::move(t));
  print(out, summary);
  return kExitOk;
}

int cmd_outer_mc(const Options& opt, const Provenance& prov, std::ostream& out) {
  std::unique_ptr<ScenarioFamily> family = family_for(opt);
  const std::size_t d = family->dimension();
  const Scheme scheme = scheme_from_string(opt.scheme);
  OuterMcConfig cfg;
  cfg.m = opt.m;
  cfg.removed = removal_count(opt, d);
  cfg.scheme = scheme;
  cfg.mode = cascade_mode_from_string(opt.mode);
  cfg.trials = opt.trials;
  cfg.seed = opt.seed;
  cfg.inner_samples = opt.inner_samples;
  cfg.jobs = opt.jobs;
  cfg.tol = opt.tol;

  const BoundFormula formula = scheme == Scheme::Cascade ? BoundFormula::Cascade : BoundFormula::Cg11;
  if (opt.target_bound && opt.eps) throw InvalidInput("give either --eps or --target-bound");
  if (opt.target_bound)
    cfg.epsilon = invert_epsilon(opt.m, d, cfg.removed, *opt.target_bound, formula).epsilon;
  else
    cfg.epsilon = require(opt.eps, "--eps");

  OuterProbabilityEstimate est = outer_probability_mc(*family, cfg);
  const double bound = evaluate_bound(formula, {opt.m, d, cfg.removed, cfg.epsilon}).value;

  Json config{{"experiment", "outer-mc"}, {"generator", family->name()}, {"m", opt.m},
              {"d", d}, {"n", opt.n}, {"removed", cfg.removed}, {"scheme", to_string(scheme)},
              {"mode", to_string(cfg.mode)}, {"epsilon", cfg.epsilon},
              {"trials", opt.trials}, {"inner_samples", opt.inner_samples}};
  Json summary = estimate_json(est);
  summary["bound_formula"] = to_string(formula);
  summary["bound"] = bound;
  summary["within_bound"] = est.point <= bound + 3.0 * est.half_width_95;
  summary["provenance"] = prov.json(config);

  CsvTable t = trial_table(est);
  t.provenance = prov.csv(config);
  write_experiment(output_dir(opt, true), "outer_mc", summary, std::move(t));
  print(out, summary);
  return kExitOk;
}

void add_source_options(CLI::App* sub, Options& o) {
  sub->add_option("--input", o.input, "Program JSON file");
  sub->add_option("--generator", o.generator, "analytic or resource");
  sub->add_option("--m", o.m, "Number of scenarios");
  sub->add_option("--d", o.d, "Dimension (resource generator)");
  sub->add_option("--n", o.n, "Rows per scenario (resource generator)");
}

std::string join(const std::vector<std::string>& args) {
  std::string s = "scenopt";
  for (const std::string& a : args) s += " " + a;
  return s;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = spec.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos)
    throw InvalidInput("grid must be start:step:end");
  double start, step, end;
  try {
    std::size_t used = 0;
    std::string parts[3] = {spec.substr(0, a), spec.substr(a + 1, b - a - 1), spec.substr(b + 1)};
    double* vals[3] = {&start, &step, &end};
    for (int i = 0; i < 3; ++i) {
      *vals[i] = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw InvalidInput("bad number in grid '" + spec + "'");
    }
  } catch (const std::logic_error&) {
    throw InvalidInput("bad number in grid '" + spec + "'");
  }
  if (!(step > 0.0) || !(end >= start)) throw InvalidInput("grid needs step > 0 and end >= start");
  const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Scenario programs with discarded constraints: bounds, cascade, greedy, experiments",
               "scenopt"};
  app.set_version_flag("--version", kVersion);
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--jobs", o.jobs, "Worker threads for Monte Carlo trials")->check(CLI::PositiveNumber);
  app.add_option("--tol-feas", o.tol.feas, "Feasibility tolerance");
  app.add_option("--tol-active", o.tol.active, "Active-row tolerance");
  app.add_option("--tol-x", o.tol.x, "Minimizer comparison tolerance");
  app.add_option("--out-dir", o.out_dir,
                 std::string("Output directory (default: $") + kOutDirEnv + ")");
  app.add_option("--seed", o.seed, "Random seed");

  CLI::App* bound = app.add_subcommand("bound", "Evaluate or invert a violation bound");
  bound->add_option("--formula", o.formula, "cg11, cascade, compression or analytic");
  bound->add_option("--m", o.m, "Number of scenarios")->required();
  bound->add_option("--d", o.d, "Dimension");
  bound->add_option("--r", o.r, "Removed scenarios");
  bound->add_option("--zeta", o.zeta, "Compression size (compression formula)");
  bound->add_option("--eps", o.eps, "Violation level");
  bound->add_option("--invert", o.invert, "Find the smallest eps with bound <= this beta");
  bound->add_option("--beta", o.beta, "Confidence parameter for --max-r");
  bound->add_flag("--max-r", o.max_r, "Largest removal count with bound <= beta");

  CLI::App* cascade = app.add_subcommand("cascade", "Run the cascade of stage programs");
  add_source_options(cascade, o);
  cascade->add_option("--ell", o.ell, "Number of discarding stages")->required();
  cascade->add_option("--mode", o.mode, "fully-supported or regularized");
  cascade->add_flag("--verify-compression", o.verify, "Re-run on the compression candidate");

  CLI::App* greedy = app.add_subcommand("greedy", "Greedy one-at-a-time removal");
  add_source_options(greedy, o);
  greedy->add_option("--r", o.removed, "Scenarios to remove")->required();

  CLI::App* experiment = app.add_subcommand("experiment", "Reproduce an experiment");
  experiment->require_subcommand(1);
  CLI::App* tight = experiment->add_subcommand("analytic-tightness", "Uniform 1-D example");
  tight->add_option("--m", o.m)->required();
  tight->add_option("--ell", o.ell)->required();
  tight->add_option("--eps", o.eps)->required();
  tight->add_option("--trials", o.trials);
  CLI::App* compare = experiment->add_subcommand("resource-compare", "Cascade vs greedy cost");
  compare->add_option("--d", o.d)->required();
  compare->add_option("--n", o.n);
  compare->add_option("--m", o.m)->required();
  compare->add_option("--beta", o.beta)->required();
  compare->add_option("--eps-grid", o.eps_grid, "start:step:end, inclusive");
  compare->add_option("--mode", o.mode);
  CLI::App* outer = experiment->add_subcommand("outer-mc", "Outer probability by Monte Carlo");
  outer->add_option("--generator", o.generator)->required();
  outer->add_option("--m", o.m)->required();
  outer->add_option("--d", o.d);
  outer->add_option("--n", o.n);
  outer->add_option("--ell", o.ell);
  outer->add_option("--r", o.removed);
  outer->add_option("--scheme", o.scheme, "cascade or greedy");
  outer->add_option("--mode", o.mode);
  outer->add_option("--eps", o.eps);
  outer->add_option("--target-bound", o.target_bound, "Choose eps so the bound equals this");
  outer->add_option("--trials", o.trials);
  outer->add_option("--inner-samples", o.inner_samples);

  std::vector<std::string> argv_store{"scenopt"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  Provenance prov{join(args), o};
  try {
    if (*bound) return cmd_bound(o, out);
    if (*cascade) return cmd_cascade(o, prov, out);
    if (*greedy) return cmd_greedy(o, prov, out);
    if (*tight) return cmd_analytic_tightness(o, prov, out);
    if (*compare) return cmd_resource_compare(o, prov, out);
    if (*outer) return cmd_outer_mc(o, prov, out);
  } catch (const AssumptionViolated& e) {
    err << "error: " << e.what() << " (stage " << e.stage << ")\n";
    return kExitAssumption;
  } catch (const DegeneracyDetected& e) {
    err << "error: " << e.what() << " (stage " << e.stage << ")\n";
    return kExitAssumption;
  } catch (const StageSolveFailed& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InsufficientScenarios& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << "error: no command\n";
  return kExitUsage;
}

}  // namespace scenopt
