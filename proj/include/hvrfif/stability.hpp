#pragma once

// Sensitivity of the interpolant to perturbations of the data: the
// rescaling map between node sets, the conjugated perturbed system, the
// four a priori bounds on sup|f1 - f1*| and a harness that checks each
// bound against two computed fixed points.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hvrfif/construction.hpp"
#include "hvrfif/evaluator.hpp"
#include "hvrfif/smoothness.hpp"

namespace hvrfif {

enum class PerturbationKind { abscissa, ordinate, hidden, combined };

std::string_view to_string(PerturbationKind k) noexcept;

/// Per-node displacements, abscissas in unit coordinates.
struct Perturbation {
  PerturbationKind kind = PerturbationKind::ordinate;
  std::vector<Node> deltas;
  double max_dx = 0.0;
  double max_dy = 0.0;
  double max_dz = 0.0;
};

/// Validates the displacements against the model (end abscissas fixed,
/// order kept, only the coordinates `kind` allows are moved).
Perturbation make_perturbation(const RifsModel& model, PerturbationKind kind, std::vector<Node> deltas);

/// Uniform draw in the box of the given magnitudes; abscissa draws that
/// break the order are rejected and redrawn.
Perturbation draw_perturbation(const RifsModel& model, PerturbationKind kind, double max_dx, double max_dy,
                               double max_dz, std::mt19937_64& rng);

/// Perturbed nodes on the unit interval.
ExtendedDataset perturbed_data(const RifsModel& model, const Perturbation& p);

/// Piecewise-affine R with R(x_i) = x_i* for all nodes.
PiecewiseAffineMap rescale_map(std::span<const double> original, std::span<const double> perturbed);

/// The system on the perturbed nodes with L* = R o L o R^-1 and
/// s* = s o R^-1; shift functions are rebuilt from the perturbed data.
RifsModel conjugate_model(const RifsModel& model, const PiecewiseAffineMap& R, const ExtendedDataset& perturbed_unit);

RifsModel perturb_model(const RifsModel& model, const Perturbation& p);

struct StabilityConstants {
  double omega = 0.0;
  double omega_tilde = 0.0;
  double N = 0.0;
  double tau = 1.0;
  double L1 = 0.0;
  double L2 = 0.0;
  double y_max = 0.0;
  double z_max = 0.0;
  double domain_min = 0.0;
};

double abscissa_bound(const StabilityConstants& c, double max_dx);
double ordinate_bound(const StabilityConstants& c, double max_dy);
double hidden_bound(const StabilityConstants& c, double max_dz);
double combined_bound(const StabilityConstants& c, double max_dx, double max_dy, double max_dz);

/// Coefficient of max|dy| in the ordinate bound.
double ordinate_coefficient(double omega, double omega_tilde);
/// Coefficient of max|dz| in the hidden-ordinate bound.
double hidden_coefficient(double omega, double omega_tilde);

struct StabilityReport {
  /// 4 abscissas, 5 ordinates, 6 hidden ordinates, 7 all three.
  int bound_id = 0;
  double theoretical_bound = 0.0;
  /// Grid sup of |f1 - f1*|.
  double empirical_sup = 0.0;
  /// theoretical_bound - empirical_sup
  double margin = 0.0;
  /// Evaluation slack added to the bound: two solver tolerances.
  double budget = 0.0;
  bool passed = false;
  double max_dx = 0.0;
  double max_dy = 0.0;
  double max_dz = 0.0;
  StabilityConstants constants;
  std::vector<std::string> notes;
};

/// Unperturbed system with its solved grid and (when the smoothness
/// hypothesis holds) its Hölder constants.
struct StabilityContext {
  const RifsModel* model = nullptr;
  SolverOptions solver;
  EvaluationGrid base;
  std::optional<SmoothnessReport> smoothness;
  /// Why `smoothness` is empty.
  std::string smoothness_error;
};

StabilityContext make_stability_context(const RifsModel& model, const SolverOptions& solver, double alpha = 0.1,
                                        bool measured_bounds = false);

/// sup |f1 - g1| over the union of both grids, linear interpolation in between.
double empirical_sup_difference(const EvaluationGrid& a, const EvaluationGrid& b);

StabilityReport bound_abscissa(const StabilityContext& ctx, const Perturbation& p);
StabilityReport bound_ordinate(const StabilityContext& ctx, const Perturbation& p);
StabilityReport bound_hidden(const StabilityContext& ctx, const Perturbation& p);
StabilityReport bound_combined(const StabilityContext& ctx, const Perturbation& p);

StabilityReport check_bound(const StabilityContext& ctx, int bound_id, const Perturbation& p);

PerturbationKind kind_for_bound(int bound_id);

struct Magnitudes {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
};

/// Seeded trials; trial t draws from its own stream so results do not
/// depend on evaluation order.
std::vector<StabilityReport> run_stability_trials(const StabilityContext& ctx, int bound_id, Magnitudes magnitudes,
                                                  std::size_t trials, std::uint64_t seed);

}  // namespace hvrfif
