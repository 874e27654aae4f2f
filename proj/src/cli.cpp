#include "wfshap/cli.hpp"

#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "wfshap/analysis.hpp"
#include "wfshap/game_io.hpp"
#include "wfshap/manifest.hpp"
#include "wfshap/pipeline.hpp"
#include "wfshap/report.hpp"
#include "wfshap/simulator.hpp"

namespace wfshap {

namespace {

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  std::string command;
};

struct OutputOptions {
  std::string out;
  std::string format = "text";
};

void add_output_options(CLI::App* cmd, OutputOptions& o) {
  cmd->add_option("--out", o.out, "also write the report to this file, with a manifest beside it");
  cmd->add_option("--format", o.format, "text, csv or json")->capture_default_str();
}

std::uint64_t resolve_seed(const CLI::Option* option, std::uint64_t value) {
  if (option->count() > 0) return value;
  std::random_device rd;
  return (std::uint64_t{rd()} << 32) ^ std::uint64_t{rd()};
}

void print_findings(const ValidationReport& report, std::ostream& err) {
  for (const auto& f : report.findings) {
    err << (f.severity == Severity::kError ? "error: " : "warning: ") << f.message << "\n";
  }
}

RunManifest new_manifest(const Streams& io) {
  RunManifest m;
  m.command = io.command;
  m.timestamp = utc_timestamp();
  return m;
}

/// Report to stdout; with --out also to the file plus "<out>.manifest".
/// Without --out the manifest goes to stderr.
void deliver(const std::string& report, const OutputOptions& o, const RunManifest& manifest, const Streams& io) {
  io.out << report;
  if (o.out.empty()) {
    io.err << "manifest: " << format_manifest_json(manifest);
    return;
  }
  write_text_file(o.out, report);
  write_text_file(o.out + ".manifest", format_manifest_json(manifest));
}

Method parse_compute_method(const std::string& name) {
  const auto m = parse_method(name);
  if (m == Method::kReported) throw ValidationError("method 'reported' cannot be computed; use --reported");
  return m;
}

EstimatorConfig estimator(const std::string& method, std::size_t samples, std::uint64_t seed) {
  EstimatorConfig cfg;
  cfg.method = parse_compute_method(method);
  cfg.samples = samples;
  cfg.seed = seed;
  return cfg;
}

SyntheticGameSpec read_spec_file(const std::string& path) {
  const auto text = read_text_file(path);
  try {
    return parse_spec_json(text);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::vector<std::string> read_task_file(const std::string& path) {
  std::istringstream lines(read_text_file(path));
  std::vector<std::string> tasks;
  for (std::string line; std::getline(lines, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    tasks.push_back(line.substr(first, last - first + 1));
  }
  return tasks;
}

// attribute

struct AttributeOptions {
  std::string game, records, reported, candidate, policy = "zero", method = "exact";
  std::vector<std::string> components;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  double tol = 0.005;
  CLI::Option* seed_opt = nullptr;
  OutputOptions output;
};

int cmd_attribute(const AttributeOptions& o, const Streams& io) {
  const int sources = !o.game.empty() + !o.records.empty() + !o.reported.empty();
  if (sources != 1) throw ValidationError("give exactly one of --game, --records or --reported");
  const auto format = parse_format(o.output.format);
  auto manifest = new_manifest(io);

  if (!o.reported.empty()) {
    if (o.candidate.empty()) throw ValidationError("--reported needs --candidate");
    const auto table = read_attribution_table_file(o.reported);
    manifest.add_input(o.reported);
    const auto result = reported_result(table, o.candidate);
    const auto axioms = check_axioms(endpoint_game(table, o.candidate), result, o.tol);
    io.err << "efficiency residual " << format_double(axioms.efficiency_residual) << " (tolerance "
           << format_double(o.tol) << "): " << (axioms.efficiency_pass ? "pass" : "fail") << "\n";
    deliver(emit_report(result, format), o.output, manifest, io);
    return kExitOk;
  }

  std::optional<GameTable> game;
  if (!o.game.empty()) {
    game.emplace(read_game_file(o.game));
    manifest.add_input(o.game);
  } else {
    if (o.components.empty()) throw ValidationError("--records needs --components");
    const ComponentSet components(o.components);
    const auto records = parse_records(read_text_file(o.records), components);
    manifest.add_input(o.records);
    game.emplace(build_game_from_records(records, components, parse_failure_policy(o.policy)));
  }

  const auto report = validate_game(*game);
  print_findings(report, io.err);
  if (report.has_errors()) return kExitValidation;

  auto cfg = estimator(o.method, o.samples, 0);
  AttributionResult result;
  if (cfg.method == Method::kExact) {
    result = shapley_exact(*game);
  } else {
    cfg.seed = resolve_seed(o.seed_opt, o.seed);
    manifest.seed = cfg.seed;
    result = shapley_permutation(*game, cfg);
  }
  deliver(emit_report(result, format), o.output, manifest, io);
  return kExitOk;
}

// synergy / sweep

struct GameSourceOptions {
  std::string game, simulate;
  OutputOptions output;
};

GameTable load_game_source(const GameSourceOptions& o, RunManifest& manifest) {
  if (o.game.empty() == o.simulate.empty()) throw ValidationError("give exactly one of --game or --simulate");
  if (!o.game.empty()) {
    auto game = read_game_file(o.game);
    manifest.add_input(o.game);
    return game;
  }
  const auto spec = read_spec_file(o.simulate);
  manifest.add_input(o.simulate);
  return synthesize_game(spec).table;
}

int cmd_synergy(const GameSourceOptions& o, const Streams& io) {
  const auto format = parse_format(o.output.format);
  auto manifest = new_manifest(io);
  const auto game = load_game_source(o, manifest);
  const auto matrix = synergy_matrix(game);
  for (double v : matrix.entries) {
    if (!std::isfinite(v)) throw ValidationError("synergy is non-finite; the game has non-finite values");
  }
  deliver(emit_report(matrix, format), o.output, manifest, io);
  return kExitOk;
}

int cmd_sweep(const GameSourceOptions& o, const Streams& io) {
  const auto format = parse_format(o.output.format);
  auto manifest = new_manifest(io);
  const auto game = load_game_source(o, manifest);
  deliver(emit_report(coalition_sweep(game), format), o.output, manifest, io);
  return kExitOk;
}

// optimize / consistency

struct OptimizeOptions {
  std::string table;
  OutputOptions output;
};

int cmd_optimize(const OptimizeOptions& o, const Streams& io) {
  const auto format = parse_format(o.output.format);
  auto manifest = new_manifest(io);
  const auto table = read_attribution_table_file(o.table);
  manifest.add_input(o.table);
  deliver(emit_report(discover_optimal_configuration(table), format), o.output, manifest, io);
  return kExitOk;
}

struct ConsistencyOptions {
  std::string table_a, table_b, component;
  bool all = false;
  OutputOptions output;
};

int cmd_consistency(const ConsistencyOptions& o, const Streams& io) {
  const auto format = parse_format(o.output.format);
  auto manifest = new_manifest(io);
  const auto a = read_attribution_table_file(o.table_a);
  const auto b = read_attribution_table_file(o.table_b);
  manifest.add_input(o.table_a);
  manifest.add_input(o.table_b);
  std::optional<std::string> component;
  if (!o.component.empty()) component = o.component;
  deliver(emit_report(compare_tables(a, b, component), format), o.output, manifest, io);
  return kExitOk;
}

// run

struct RunCmdOptions {
  std::string adapter, tasks, cache, policy = "zero", method = "exact";
  std::vector<std::string> components;
  std::size_t num_tasks = 0, samples = 10000, parallel = 1;
  std::uint64_t seed = 0;
  double timeout = 60.0;
  unsigned retries = 2;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* timeout_opt = nullptr;
  CLI::Option* retries_opt = nullptr;
  OutputOptions output;
};

int cmd_run(const RunCmdOptions& o, const Streams& io) {
  const auto format = parse_format(o.output.format);
  if (o.output.out.empty()) throw ValidationError("run needs --out");
  if (o.tasks.empty() == (o.num_tasks == 0)) throw ValidationError("give exactly one of --tasks or --num-tasks");
  const ComponentSet components(o.components);
  if (components.empty()) throw ValidationError("--components must name at least one component");

  auto manifest = new_manifest(io);
  auto adapter = EvaluatorAdapter::parse(o.adapter);
  if (o.timeout_opt->count() > 0) {
    adapter.timeout = std::chrono::milliseconds(static_cast<long long>(o.timeout * 1000.0));
  }
  if (o.retries_opt->count() > 0) adapter.max_retries = o.retries;
  adapter.validate();
  if (adapter.kind == AdapterKind::kSimulator) manifest.add_input(adapter.target);

  std::vector<std::string> tasks;
  if (!o.tasks.empty()) {
    tasks = read_task_file(o.tasks);
    manifest.add_input(o.tasks);
  } else {
    tasks = numbered_task_ids(o.num_tasks);
  }

  auto cfg = estimator(o.method, o.samples, resolve_seed(o.seed_opt, o.seed));
  manifest.seed = cfg.seed;
  RunOptions options;
  options.failure_policy = parse_failure_policy(o.policy);
  options.parallelism = std::max<std::size_t>(o.parallel, 1);

  auto evaluator = make_evaluator(adapter, components, cfg.seed);
  std::optional<CoalitionCache> cache;
  if (o.cache.empty()) {
    cache.emplace();
  } else {
    cache.emplace(o.cache);
  }

  const std::string manifest_path = o.output.out + ".manifest";
  RunOutcome outcome;
  try {
    outcome = run_workflow_attribution(*evaluator, components, tasks, cfg, *cache, options);
  } catch (const RunAborted& e) {
    manifest.status = "aborted";
    manifest.completed = e.completed();
    manifest.failed_mask = e.failed_mask();
    manifest.error = e.what();
    write_text_file(manifest_path, format_manifest_json(manifest));
    io.err << "error: " << e.what() << "\n"
           << "run aborted after " << e.completed().size() << " coalition(s); progress written to " << manifest_path
           << "\n";
    return kExitEnvironment;
  }

  manifest.evaluations = outcome.evaluations;
  manifest.cache_hits = outcome.cache_hits;
  io.err << "evaluated " << outcome.evaluations << " coalition(s), " << outcome.cache_hits << " from cache\n";
  if (outcome.table) write_game_file(*outcome.table, o.output.out + ".game.json");
  deliver(emit_report(outcome.result, format), o.output, manifest, io);
  return kExitOk;
}

// sim-evaluator

struct SimEvaluatorOptions {
  std::string spec;
  std::vector<std::string> components;
  std::uint64_t seed = 0;
};

int cmd_sim_evaluator(const SimEvaluatorOptions& o, const Streams& io) {
  auto spec = read_spec_file(o.spec);
  ComponentSet components = o.components.empty() ? default_components(spec.n) : ComponentSet(o.components);
  if (components.size() != spec.n) {
    throw ValidationError("spec has " + std::to_string(spec.n) + " components but " +
                          std::to_string(components.size()) + " labels were given");
  }
  const SimulatorEvaluator sim(std::move(spec), std::move(components), o.seed);
  for (std::string line; std::getline(io.in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    io.out << sim.respond(line) << '\n';
    io.out.flush();
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shapley attribution for multi-component workflows", "wfshap"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string command = "wfshap";
  for (int i = 1; i < argc; ++i) command += std::string(" ") + argv[i];
  const Streams io{in, out, err, command};
  std::function<int()> action;

  AttributeOptions attr;
  auto* attribute = app.add_subcommand("attribute", "Shapley values of a game, record set, or published row");
  attribute->add_option("--game", attr.game, "game table file");
  attribute->add_option("--records", attr.records, "task outcome records (one JSON object per line)");
  attribute->add_option("--components", attr.components, "component labels for --records")->delimiter(',');
  attribute->add_option("--failure-policy", attr.policy, "zero or exclude")->capture_default_str();
  attribute->add_option("--reported", attr.reported, "model attribution table holding published values");
  attribute->add_option("--candidate", attr.candidate, "row of the --reported table");
  attribute->add_option("--tol", attr.tol, "efficiency tolerance for --reported")->capture_default_str();
  attribute->add_option("--method", attr.method, "exact or mc")->capture_default_str();
  attribute->add_option("--samples", attr.samples, "orderings for mc")->capture_default_str();
  attr.seed_opt = attribute->add_option("--seed", attr.seed, "seed for mc");
  add_output_options(attribute, attr.output);
  attribute->callback([&] { action = [&] { return cmd_attribute(attr, io); }; });

  GameSourceOptions syn;
  auto* synergy = app.add_subcommand("synergy", "pairwise synergy matrix");
  synergy->add_option("--game", syn.game, "game table file");
  synergy->add_option("--simulate", syn.simulate, "synthetic game spec file");
  add_output_options(synergy, syn.output);
  synergy->callback([&] { action = [&] { return cmd_synergy(syn, io); }; });

  GameSourceOptions swp;
  auto* sweep = app.add_subcommand("sweep", "every coalition value in ascending mask order");
  sweep->add_option("--game", swp.game, "game table file");
  sweep->add_option("--simulate", swp.simulate, "synthetic game spec file");
  add_output_options(sweep, swp.output);
  sweep->callback([&] { action = [&] { return cmd_sweep(swp, io); }; });

  OptimizeOptions opt;
  auto* optimize = app.add_subcommand("optimize", "per-component best candidate of an attribution table");
  optimize->add_option("table", opt.table, "model attribution table")->required();
  add_output_options(optimize, opt.output);
  optimize->callback([&] { action = [&] { return cmd_optimize(opt, io); }; });

  ConsistencyOptions con;
  auto* consistency = app.add_subcommand("consistency", "ranking consistency between two attribution tables");
  consistency->add_option("table_a", con.table_a, "first table")->required();
  consistency->add_option("table_b", con.table_b, "second table")->required();
  auto* component_opt = consistency->add_option("--component", con.component, "one component");
  consistency->add_flag("--all", con.all, "every component (default)")->excludes(component_opt);
  add_output_options(consistency, con.output);
  consistency->callback([&] { action = [&] { return cmd_consistency(con, io); }; });

  RunCmdOptions run;
  auto* run_cmd = app.add_subcommand("run", "evaluate coalitions through an evaluator and attribute");
  run_cmd->add_option("--adapter", run.adapter, "subprocess:CMD, http:URL or sim:SPEC")->required();
  run_cmd->add_option("--components", run.components, "component labels")->delimiter(',')->required();
  run_cmd->add_option("--tasks", run.tasks, "task id file, one per line");
  run_cmd->add_option("--num-tasks", run.num_tasks, "use ids t0000, t0001, ...");
  run_cmd->add_option("--method", run.method, "exact or mc")->capture_default_str();
  run_cmd->add_option("--samples", run.samples, "orderings for mc")->capture_default_str();
  run.seed_opt = run_cmd->add_option("--seed", run.seed, "seed for sampling and the simulator");
  run_cmd->add_option("--cache", run.cache, "cache directory");
  run_cmd->add_option("--parallel", run.parallel, "concurrent coalition evaluations")->capture_default_str();
  run_cmd->add_option("--failure-policy", run.policy, "zero or exclude")->capture_default_str();
  run.timeout_opt = run_cmd->add_option("--timeout", run.timeout, "seconds per evaluator call");
  run.retries_opt = run_cmd->add_option("--retries", run.retries, "retries after a transport failure");
  add_output_options(run_cmd, run.output);
  run_cmd->callback([&] { action = [&] { return cmd_run(run, io); }; });

  SimEvaluatorOptions sim;
  auto* sim_cmd = app.add_subcommand("sim-evaluator", "answer evaluator requests on stdin from a synthetic spec");
  sim_cmd->add_option("--spec", sim.spec, "synthetic game spec file")->required();
  sim_cmd->add_option("--components", sim.components, "component labels (default c0, c1, ...)")->delimiter(',');
  sim_cmd->add_option("--seed", sim.seed, "seed")->capture_default_str();
  sim_cmd->callback([&] { action = [&] { return cmd_sim_evaluator(sim, io); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    return action();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ProtocolError& e) {
    err << "error: " << e.what() << "\n  offending line: " << e.offending_line() << "\n";
    return kExitEnvironment;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitEnvironment;
  }
}

}  // namespace wfshap
