// hvrfif: build, evaluate, analyse and stress-test hidden-variable recurrent
// fractal interpolation functions.
//
// Exit codes: 0 success, 1 validation or parse error, 2 solver did not
// converge, 3 a stability bound was violated.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "hvrfif/error.hpp"
#include "hvrfif/evaluator.hpp"
#include "hvrfif/io.hpp"
#include "hvrfif/smoothness.hpp"
#include "hvrfif/stability.hpp"

namespace {

using namespace hvrfif;

constexpr int kExitValidation = 1;
constexpr int kExitConvergence = 2;
constexpr int kExitBound = 3;

struct SolverFlags {
  std::size_t resolution = 4097;
  double tolerance = 1e-10;
  std::size_t max_iters = 1000;

  SolverOptions options() const { return {resolution, tolerance, max_iters}; }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--resolution", f.resolution, "uniform samples, 2^p + 1 with p >= 8")->capture_default_str();
  cmd->add_option("--tolerance", f.tolerance, "sup-norm residual at which iteration stops")->capture_default_str();
  cmd->add_option("--max-iters", f.max_iters, "sweep limit")->capture_default_str();
}

void print_warnings(const EvaluationGrid& grid) {
  for (const auto& w : grid.warnings) fmt::print(stderr, "warning: {}\n", w);
}

struct BuildArgs {
  std::string data, config, output;
};

int cmd_build(const BuildArgs& a) {
  const auto data = read_dataset_csv(a.data);
  const auto config = read_config(a.config, data.regions());
  const auto model = build_model(data, config);
  write_text(a.output, model_to_json(model));

  const auto& meta = model.metadata();
  fmt::print("regions   {}\ndomains   {}\nS_bar     {}\nL_L       {}\nl_L       {}\n", model.region_count(),
             model.partition().domain_count(), meta.s_bar, meta.ratio_max, meta.ratio_min);
  if (!model.factors().all_verified()) fmt::print("factors   unverified (user table Lipschitz constants)\n");
  fmt::print("connection matrix\n");
  const auto& cm = model.connection();
  for (std::size_t s = 0; s < cm.size(); ++s) {
    std::string row;
    for (std::size_t t = 0; t < cm.size(); ++t) row += fmt::format("{:>6}", to_string(cm(s, t)));
    fmt::print("{}\n", row);
  }
  return 0;
}

struct EvalArgs {
  std::string model, output, svg;
  SolverFlags solver;
  std::size_t chaos = 0;
  std::optional<std::uint64_t> seed;
};

int cmd_eval(const EvalArgs& a) {
  if (a.chaos > 0 && !a.seed) throw Error(ErrorCode::ParseError, "--chaos needs --seed");
  const auto model = model_from_json(read_text(a.model));
  if (a.chaos > 0) {
    const auto samples = chaos_game(model, a.chaos, *a.seed);
    const auto csv = samples_to_csv(samples, model.scale());
    if (a.output.empty())
      fmt::print("{}", csv);
    else
      write_text(a.output, csv);
    return 0;
  }
  const auto grid = solve_fixed_point(model, a.solver.options());
  print_warnings(grid);
  const auto csv = grid_to_csv(grid, model.scale());
  if (a.output.empty())
    fmt::print("{}", csv);
  else
    write_text(a.output, csv);
  if (!a.svg.empty()) write_text(a.svg, render_svg(grid, model));
  fmt::print(stderr, "{} sweeps, residual {:.3e}\n", grid.iterations, grid.residual);
  return 0;
}

struct HolderArgs {
  std::string model, grid, report;
  SolverFlags solver;
  double alpha = 0.1;
  std::vector<double> scales;
  bool measured = false;
};

int cmd_holder(const HolderArgs& a) {
  const auto model = model_from_json(read_text(a.model));
  EvaluationGrid grid;
  if (a.grid.empty()) {
    grid = solve_fixed_point(model, a.solver.options());
    print_warnings(grid);
  } else {
    grid = grid_from_csv(read_text(a.grid), model.scale());
  }

  FunctionBounds bounds;
  if (a.measured) {
    bounds = measured_bounds(grid);
  } else {
    const auto b = sup_norm_bound(model);
    bounds = {b.f1, b.f2};
  }
  const auto rep = compute_constants(model, bounds, a.alpha);
  const auto scales = a.scales.empty() ? default_scales(grid.xs.size()) : a.scales;
  const auto est = empirical_holder(grid, scales);

  fmt::print("case        {}{}\n", to_string(rep.regime), rep.near_critical ? " (near critical)" : "");
  fmt::print("delta       {}\n", rep.delta);
  fmt::print("D           {}\n", rep.D);
  fmt::print("L1, tau1    {}, {}\n", rep.L1, rep.tau1);
  fmt::print("L2, tau2    {}, {}\n", rep.L2, rep.tau2);
  fmt::print("estimate    tau1 ~ {:.4f}{}, tau2 ~ {:.4f}{}\n", est.tau1, est.degenerate1 ? " (degenerate)" : "",
             est.tau2, est.degenerate2 ? " (degenerate)" : "");
  const auto json = smoothness_to_json(rep, est);
  if (a.report.empty())
    fmt::print("{}", json);
  else
    write_text(a.report, json);
  return 0;
}

struct StabilityArgs {
  std::string model, report;
  SolverFlags solver;
  int bound_id = 5;
  double max_dx = 0.0, max_dy = 0.0, max_dz = 0.0;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  double alpha = 0.1;
  bool measured = false;
};

int cmd_stability(const StabilityArgs& a) {
  const auto model = model_from_json(read_text(a.model));
  const auto ctx = make_stability_context(model, a.solver.options(), a.alpha, a.measured);
  print_warnings(ctx.base);
  // Abscissa magnitudes are given in user units; bounds work on [0, 1].
  const Magnitudes m{a.max_dx / model.scale().span, a.max_dy, a.max_dz};
  const auto rows = run_stability_trials(ctx, a.bound_id, m, a.trials, a.seed);

  TrialSummary summary{a.bound_id, a.seed, m, 0};
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    if (!r.passed) ++summary.violations;
    worst = std::min(worst, r.margin);
  }
  if (!a.report.empty()) write_text(a.report, stability_to_json(summary, rows));
  fmt::print("bound {}: {} trials, {} violations, smallest margin {:.6e}\n", a.bound_id, rows.size(),
             summary.violations, rows.empty() ? 0.0 : worst);
  return summary.violations == 0 ? 0 : kExitBound;
}

struct RenderArgs {
  std::string model, grid, svg;
  SolverFlags solver;
};

int cmd_render(const RenderArgs& a) {
  const auto model = model_from_json(read_text(a.model));
  EvaluationGrid grid;
  if (a.grid.empty()) {
    grid = solve_fixed_point(model, a.solver.options());
    print_warnings(grid);
  } else {
    grid = grid_from_csv(read_text(a.grid), model.scale());
  }
  write_text(a.svg, render_svg(grid, model));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hidden-variable recurrent fractal interpolation"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* c_build = app.add_subcommand("build", "validate data and config, write a model file");
  c_build->add_option("--data", build.data, "CSV with header x,y,z")->required()->check(CLI::ExistingFile);
  c_build->add_option("--config", build.config, "partition and factor JSON")->required()->check(CLI::ExistingFile);
  c_build->add_option("--output,-o", build.output, "model file to write")->required();

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "solve for the interpolant and write x,f1,f2 samples");
  c_eval->add_option("--model,-m", eval.model)->required()->check(CLI::ExistingFile);
  add_solver_flags(c_eval, eval.solver);
  c_eval->add_option("--output,-o", eval.output, "CSV to write (stdout when omitted)");
  c_eval->add_option("--svg", eval.svg, "also render f1 to this SVG");
  c_eval->add_option("--chaos", eval.chaos, "emit this many random-iteration samples instead");
  c_eval->add_option("--seed", eval.seed, "seed for --chaos");

  HolderArgs holder;
  auto* c_holder = app.add_subcommand("holder", "Hölder constants and an empirical exponent estimate");
  c_holder->add_option("--model,-m", holder.model)->required()->check(CLI::ExistingFile);
  add_solver_flags(c_holder, holder.solver);
  c_holder->add_option("--alpha", holder.alpha, "exponent slack in the critical case")->capture_default_str();
  c_holder->add_option("--scales", holder.scales, "oscillation scales (unit interval)")->delimiter(',');
  c_holder->add_flag("--measured-bounds", holder.measured, "bound |f1|, |f2| by their grid sups");
  c_holder->add_option("--grid", holder.grid, "reuse a CSV written by eval")->check(CLI::ExistingFile);
  c_holder->add_option("--report", holder.report, "JSON report (stdout when omitted)");

  StabilityArgs stab;
  auto* c_stab = app.add_subcommand("stability", "check a perturbation bound on random perturbations");
  c_stab->add_option("--model,-m", stab.model)->required()->check(CLI::ExistingFile);
  add_solver_flags(c_stab, stab.solver);
  c_stab->add_option("--theorem", stab.bound_id, "4 abscissas, 5 ordinates, 6 hidden ordinates, 7 all")
      ->check(CLI::Range(4, 7))
      ->capture_default_str();
  c_stab->add_option("--max-dx", stab.max_dx, "abscissa magnitude, user units");
  c_stab->add_option("--max-dy", stab.max_dy);
  c_stab->add_option("--max-dz", stab.max_dz);
  c_stab->add_option("--trials", stab.trials)->capture_default_str();
  c_stab->add_option("--seed", stab.seed)->required();
  c_stab->add_option("--alpha", stab.alpha)->capture_default_str();
  c_stab->add_flag("--measured-bounds", stab.measured);
  c_stab->add_option("--report", stab.report, "JSON with one row per trial");

  RenderArgs render;
  auto* c_render = app.add_subcommand("render", "render f1 to SVG");
  c_render->add_option("--model,-m", render.model)->required()->check(CLI::ExistingFile);
  add_solver_flags(c_render, render.solver);
  c_render->add_option("--grid", render.grid, "reuse a CSV written by eval")->check(CLI::ExistingFile);
  c_render->add_option("--svg", render.svg)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (c_build->parsed()) return cmd_build(build);
    if (c_eval->parsed()) return cmd_eval(eval);
    if (c_holder->parsed()) return cmd_holder(holder);
    if (c_stab->parsed()) return cmd_stability(stab);
    if (c_render->parsed()) return cmd_render(render);
  } catch (const NoConvergenceError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConvergence;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitValidation;
  }
  return kExitValidation;
}
