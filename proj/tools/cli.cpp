#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <optional>

#include <CLI11.hpp>

#include "mlrfe/error.hpp"
#include "mlrfe/export.hpp"
#include "mlrfe/instance_io.hpp"
#include "mlrfe/random_instance.hpp"
#include "mlrfe/relax.hpp"
#include "mlrfe/report.hpp"

namespace mlrfe {

namespace {

struct Invalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Invalid("cannot write " + path);
  f << text;
}

std::string render(const RunReport& r, const std::string& format) {
  return format == "text" ? to_text(r) : to_json(r);
}

struct SolveSettings {
  std::string engine = "rfe";
  double time_limit = kInf;
  std::optional<double> gap;
};

RunReport solve_with(const ProblemIR& ir, const std::string& engine, const SolveSettings& s) {
  if (engine == "rfe") {
    RfeOptions opt;
    opt.time_limit = s.time_limit;
    if (s.gap) {
      opt.rel_tol = *s.gap;
      opt.nlp.rel_gap = *s.gap;
    }
    return make_report(ir, solve_rfe(ir, opt));
  }
  OracleOptions opt;
  opt.time_limit = s.time_limit;
  if (s.gap) opt.nlp.rel_gap = *s.gap;
  const auto t0 = std::chrono::steady_clock::now();
  auto res = enumerate_oracle(ir, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return make_report(ir, res, secs);
}

OpoShape custom_shape(std::size_t wells, std::size_t manifolds, const std::vector<std::size_t>& wg,
                      const std::vector<std::size_t>& mg) {
  if (wg.size() != 3) throw Invalid("--well-grid needs 3 sizes");
  if (mg.size() != 4) throw Invalid("--manifold-grid needs 4 sizes");
  OpoShape s;
  s.wells = wells;
  s.manifolds = manifolds;
  std::copy(wg.begin(), wg.end(), s.grids.well.begin());
  std::copy(mg.begin(), mg.end(), s.grids.manifold.begin());
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Global optimisation of mixed-integer programs over look-up table interpolants",
               "mlrfe"};
  app.require_subcommand(1);
  std::function<int()> action;

  // generate
  auto* gen = app.add_subcommand("generate", "Sample an oil-production instance");
  std::string scenario_id;
  std::uint64_t seed = 0;
  std::string output;
  bool full = false;
  std::size_t wells = 0;
  std::size_t manifolds = 0;
  std::vector<std::size_t> well_grid{4, 3, 3};
  std::vector<std::size_t> manifold_grid{3, 3, 3, 3};
  gen->add_option("--scenario", scenario_id, "Catalog id S1..S9; omit for a custom shape");
  gen->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen->add_flag("--full", full, "Use the full-scale grid preset of the catalog entry");
  gen->add_option("--wells", wells, "Custom shape: number of wells");
  gen->add_option("--manifolds", manifolds, "Custom shape: number of manifolds");
  gen->add_option("--well-grid", well_grid, "Custom shape: breakpoints per well axis (q_liq p_ds iglr)")
      ->expected(3);
  gen->add_option("--manifold-grid", manifold_grid,
                  "Custom shape: breakpoints per manifold axis (q_liq iglr gor wct)")
      ->expected(4);
  gen->add_option("-o,--output", output, "Instance path (stdout when omitted)");
  gen->callback([&] {
    action = [&] {
      ScenarioMeta meta;
      if (!scenario_id.empty()) {
        const Scenario& sc = find_scenario(scenario_id);
        meta = {sc.id, sc.shape(full)};
      } else {
        meta = {"custom", custom_shape(wells, manifolds, well_grid, manifold_grid)};
      }
      emit(serialize_instance(generate_opo(meta, seed)), output, out);
      return int{kExitOptimal};
    };
  });

  // solve
  auto* solve = app.add_subcommand("solve", "Solve an instance and write a run report");
  std::string instance_path;
  SolveSettings settings;
  std::string report_format = "json";
  solve->add_option("instance", instance_path, "Instance file")->required();
  solve->add_option("--engine", settings.engine, "rfe or oracle")
      ->check(CLI::IsMember({"rfe", "oracle"}))
      ->capture_default_str();
  solve->add_option("--time-limit", settings.time_limit, "Wall-clock limit in seconds");
  solve->add_option("--gap", settings.gap, "Relative optimality gap");
  solve->add_option("--format", report_format, "Report format: json or text")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  solve->add_option("-o,--output", output, "Report path (stdout when omitted)");
  solve->callback([&] {
    action = [&] {
      const Instance inst = read_instance(instance_path);
      RunReport rep = solve_with(inst.problem, settings.engine, settings);
      rep.instance = instance_path;
      emit(render(rep, report_format), output, out);
      return exit_code(rep);
    };
  });

  // export
  auto* exp = app.add_subcommand("export", "Write the root MILP relaxation for external solvers");
  std::string export_format = "mps";
  exp->add_option("instance", instance_path, "Instance file")->required();
  exp->add_option("--format", export_format, "mps, free-mps or lp")->capture_default_str();
  exp->add_option("-o,--output", output, "Output path (stdout when omitted)");
  exp->callback([&] {
    action = [&] {
      const ExportFormat fmt = parse_export_format(export_format);
      const Instance inst = read_instance(instance_path);
      emit(export_milp(build_relaxation(inst.problem), fmt), output, out);
      return int{kExitOptimal};
    };
  });

  // bench
  auto* bench = app.add_subcommand("bench", "Solve a batch with both engines and tabulate");
  std::vector<std::string> files;
  std::size_t count = 5;
  bench->add_option("instances", files, "Instance files; without them instances are generated");
  bench->add_option("--scenario", scenario_id, "Generate this catalog entry (desk preset)");
  bench->add_option("--count", count, "Number of generated instances")->capture_default_str();
  bench->add_option("--seed", seed, "First seed of generated instances")->capture_default_str();
  bench->add_option("--time-limit", settings.time_limit, "Per-engine limit per instance, seconds");
  bench->add_option("--gap", settings.gap, "Relative optimality gap");
  bench->add_option("--format", report_format, "json or text")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  bench->add_option("-o,--output", output, "Summary path (stdout when omitted)");
  bench->callback([&] {
    action = [&] {
      std::vector<std::pair<std::string, std::function<ProblemIR()>>> jobs;
      if (!files.empty()) {
        for (const auto& f : files) jobs.emplace_back(f, [f] { return read_instance(f).problem; });
      } else {
        const std::optional<Scenario> sc =
            scenario_id.empty() ? std::nullopt : std::optional<Scenario>(find_scenario(scenario_id));
        for (std::size_t k = 0; k < count; ++k) {
          const std::uint64_t s = seed + k;
          if (sc) {
            jobs.emplace_back(sc->id + "/seed" + std::to_string(s),
                              [sc, s] { return build_opo_instance(sc->shape(), s); });
          } else {
            jobs.emplace_back("random/seed" + std::to_string(s), [s] { return random_instance(s); });
          }
        }
      }
      std::vector<BatchRow> rows;
      for (const auto& [name, load] : jobs) {
        BatchRow row;
        row.instance = name;
        try {
          const ProblemIR ir = load();
          row.rfe = solve_with(ir, "rfe", settings);
          row.oracle = solve_with(ir, "oracle", settings);
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        rows.push_back(std::move(row));
      }
      const BatchSummary sum = summarize(std::move(rows));
      emit(report_format == "text" ? to_text(sum) : to_json(sum), output, out);
      return int{kExitOptimal};
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOptimal : kExitInvalid;
  }

  try {
    return action();
  } catch (const Invalid& e) {
    err << "mlrfe: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const Error& e) {
    err << "mlrfe: " << e.what() << "\n";
    return e.code() == ErrorCode::NumericalFailure ? kExitError : kExitInvalid;
  } catch (const std::exception& e) {
    err << "mlrfe: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace mlrfe
