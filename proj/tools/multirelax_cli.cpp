/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "multirelax/external_solver.hpp"
#include "multirelax/pipeline.hpp"

namespace {

using namespace multirelax;

struct Options {
  std::string instance;
  std::string method = "ppr";
  std::string grouping = "((a*b)*c)*d";
  std::vector<int> partitions;
  std::string recovery = "fa";
  int aux_partitions = 0;
  std::string solver = "internal";
  std::string solver_cmd;
  std::uint64_t seed = 1;
  int count = 30;
  std::string out;
  double time_limit = 3600.0;
};

ProblemSpec load_instance(const Options& o) {
  return o.instance.empty() ? build_benchmark_instance() : load_problem(o.instance);
}

int single_partition(const Options& o) {
  if (o.partitions.size() > 1) throw CLI::ValidationError("--partitions", "takes one value for this subcommand");
  return o.partitions.empty() ? 2 : o.partitions.front();
}

std::vector<int> partition_sweep(const Options& o) {
  return o.partitions.empty() ? std::vector<int>{2, 4, 6, 8, 10, 12} : o.partitions;
}

RecoveryVariant parse_recovery(const std::string& s) {
  if (s == "fa") return RecoveryVariant::fa;
  if (s == "ff1") return RecoveryVariant::ff1;
  return RecoveryVariant::ff2;
}

PipelineConfig base_config(const Options& o) {
  PipelineConfig cfg;
  cfg.solve.time_limit_seconds = o.time_limit;
  cfg.aux_partitions = o.aux_partitions;
  if (o.solver == "external") {
    cfg.solver = external_solver(resolve_solver_command(o.solver_cmd.empty() ? std::nullopt
                                                                             : std::optional<std::string>(o.solver_cmd)));
    cfg.solver_name = "external";
  }
  return cfg;
}

PipelineConfig method_config(const Options& o, const std::string& method, const std::string& grouping, int arity) {
  auto cfg = base_config(o);
  if (method == "rppr") {
    cfg.method = Method::rppr;
    cfg.tree = parse_positional_grouping(grouping, static_cast<std::size_t>(arity));
    cfg.grouping_text = grouping;
  }
  return cfg;
}

int term_arity(const ProblemSpec& spec) {
  if (spec.terms.empty()) throw std::invalid_argument("instance has no multilinear terms");
  const auto n = spec.terms.front().variables.size();
  for (const auto& t : spec.terms) {
    if (t.variables.size() != n) throw std::invalid_argument("groupings need every term to have the same arity");
  }
  return static_cast<int>(n);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << text;
}

void log_row(const ExperimentRow& r) {
  std::cerr << r.method << " " << r.recovery << " p=" << r.partitions << " ub=" << format_number(r.ub)
            << " lb=" << format_number(r.lb) << " (" << format_number(r.wall_seconds) << " s)\n";
}

int run_build(const Options& o) {
  const auto spec = load_instance(o);
  const int arity = o.method == "rppr" ? term_arity(spec) : 0;
  const auto cfg = method_config(o, o.method, o.grouping, arity);
  auto relax = build_relaxation(spec, cfg.method, single_partition(o), cfg.tree);
  write_output(o.out, write_lp_file(relax.base.model));
  return 0;
}

int run_solve(const Options& o) {
  const auto spec = load_instance(o);
  const int arity = o.method == "rppr" ? term_arity(spec) : 0;
  const auto cfg = method_config(o, o.method, o.grouping, arity);
  auto relax = build_relaxation(spec, cfg.method, single_partition(o), cfg.tree);
  auto report = cfg.solver(relax.base.model, cfg.solve);
  std::ostringstream os;
  os << "status " << to_string(report.solution.status) << '\n';
  os << "bound " << format_number(report.solution.status == SolveStatus::limit ? report.stats.best_bound
                                                                                : report.solution.objective)
     << '\n';
  os << "nodes " << report.stats.nodes << '\n';
  if (report.solution.has_point()) {
    const auto boxes = active_boxes(relax, report.solution);
    for (std::size_t t = 0; t < boxes.size(); ++t) {
      os << "active " << spec.terms[t].output;
      for (const auto& iv : boxes[t].dims) os << " [" << format_number(iv.lo) << ", " << format_number(iv.hi) << "]";
      os << '\n';
    }
  }
  write_output(o.out, os.str());
  return report.solution.status == SolveStatus::optimal || report.solution.status == SolveStatus::limit ? 0 : 2;
}

int run_recover(const Options& o) {
  const auto spec = load_instance(o);
  const int arity = o.method == "rppr" || o.recovery == "ff2" ? term_arity(spec) : 0;
  auto cfg = method_config(o, o.method, o.grouping, arity);
  if (o.recovery == "ff2" && !cfg.tree) {
    cfg.tree = parse_positional_grouping(o.grouping, static_cast<std::size_t>(arity));
  }
  cfg.partitions = single_partition(o);
  cfg.recovery = parse_recovery(o.recovery);
  const auto res = run_pipeline(spec, cfg);
  log_row(res.row);
  write_output(o.out, format_csv({res.row}));
  return 0;
}

int run_benchmark(const Options& o) {
  const auto spec = load_instance(o);
  const int arity = term_arity(spec);
  std::vector<ExperimentRow> rows;
  for (int p : partition_sweep(o)) {
    for (const char* rec : {"fa", "ff1"}) {
      auto cfg = method_config(o, "ppr", "", arity);
      cfg.partitions = p;
      cfg.recovery = parse_recovery(rec);
      rows.push_back(run_pipeline(spec, cfg).row);
      log_row(rows.back());
    }
    for (const auto& g : standard_groupings()) {
      for (const char* rec : {"fa", "ff1", "ff2"}) {
        auto cfg = method_config(o, "rppr", g, arity);
        cfg.partitions = p;
        cfg.recovery = parse_recovery(rec);
        rows.push_back(run_pipeline(spec, cfg).row);
        log_row(rows.back());
      }
    }
  }
  write_output(o.out, format_csv(rows, true));
  return 0;
}

int run_random_study(const Options& o) {
  if (o.count < 1) throw CLI::ValidationError("--count", "must be positive");
  std::vector<ExperimentRow> all;
  for (int k = 0; k < o.count; ++k) {
    const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(k);
    const auto spec = randomize_bounds(random_instance(seed), seed);
    const int arity = term_arity(spec);
    std::vector<ExperimentRow> rows;
    for (int p : partition_sweep(o)) {
      auto cfg = method_config(o, "ppr", "", arity);
      cfg.partitions = p;
      rows.push_back(run_pipeline(spec, cfg).row);
      for (const auto& g : standard_groupings()) {
        auto rc = method_config(o, "rppr", g, arity);
        rc.partitions = p;
        rows.push_back(run_pipeline(spec, rc).row);
      }
    }
    apply_reference_gaps(rows, spec.objective.sense);
    std::cerr << "instance " << seed << ": " << rows.size() << " rows\n";
    all.insert(all.end(), rows.begin(), rows.end());
  }
  if (o.out.empty()) {
    std::cout << format_csv(all);
  } else {
    emit_csv(all, o.out);
    emit_boxplot_data(all, o.out + ".boxplot.csv");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Piecewise polyhedral relaxations of multilinear programs"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool sweep) {
    sub->add_option("--instance", o.instance, "Problem JSON (default: built-in quadrilinear benchmark)")
        ->check(CLI::ExistingFile);
    sub->add_option("--partitions", o.partitions, sweep ? "Partition counts to sweep" : "Intervals per variable")
        ->delimiter(',')
        ->check(CLI::Range(1, 1000));
    sub->add_option("--aux-partitions", o.aux_partitions, "Uniform intervals per auxiliary in ff2 (0: products of child breakpoints)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--solver", o.solver, "MILP backend")->check(CLI::IsMember({"internal", "external"}));
    sub->add_option("--solver-cmd", o.solver_cmd, "External command template with {lp_in} and {sol_out}");
    sub->add_option("--out", o.out, "Output path (default: stdout)");
    sub->add_option("--time-limit", o.time_limit, "Seconds per MILP solve")->check(CLI::PositiveNumber);
  };
  auto add_method = [&](CLI::App* sub) {
    sub->add_option("--method", o.method, "Relaxation")->check(CLI::IsMember({"ppr", "rppr"}));
    sub->add_option("--grouping", o.grouping, "Bilinear grouping over positional factors a, b, c, ...");
  };

  auto* build = app.add_subcommand("build", "Write the relaxation as an LP file");
  add_common(build, false);
  add_method(build);
  auto* solve = app.add_subcommand("solve", "Solve the relaxation only");
  add_common(solve, false);
  add_method(solve);
  auto* recover = app.add_subcommand("recover", "Relax, recover a feasible point, and report gaps as CSV");
  add_common(recover, false);
  add_method(recover);
  recover->add_option("--recovery", o.recovery, "Recovery formulation")->check(CLI::IsMember({"fa", "ff1", "ff2"}));
  auto* bench = app.add_subcommand("benchmark", "Sweep every method and recovery over partition counts");
  add_common(bench, true);
  auto* study = app.add_subcommand("random-study", "Compare methods on random instances with randomized bounds");
  add_common(study, true);
  study->add_option("--seed", o.seed, "First instance seed");
  study->add_option("--count", o.count, "Number of instances");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*build) return run_build(o);
    if (*solve) return run_solve(o);
    if (*recover) return run_recover(o);
    if (*bench) return run_benchmark(o);
    return run_random_study(o);
  } catch (const AdapterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (!e.diagnostics().empty()) std::cerr << "solver output:\n" << e.diagnostics();
    return 1;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
