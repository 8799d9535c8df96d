#pragma once

// Hölder regularity of the interpolant: the a priori constants (L, tau) in
// |f(x1) - f(x2)| <= L |x1 - x2|^tau, and an empirical exponent estimate
// from a computed grid. All constants refer to the unit abscissa interval.

#include <span>
#include <string_view>
#include <vector>

#include "hvrfif/construction.hpp"
#include "hvrfif/evaluator.hpp"

namespace hvrfif {

/// -x^alpha ln x, which lies in (0, 1/(alpha e)] for 0 < x < 1.
double log_power_bound(double alpha, double x);

enum class HolderRegime { sub, critical, super };

std::string_view to_string(HolderRegime r) noexcept;

struct SmoothnessReport {
  double delta = 0.0;
  HolderRegime regime = HolderRegime::sub;
  /// delta was within 1e-12 of 1 but not equal; treated as critical.
  bool near_critical = false;
  double L1 = 0.0;
  double L2 = 0.0;
  double tau1 = 1.0;
  double tau2 = 1.0;

  double ratio_max = 0.0;  // L_L
  double ratio_min = 0.0;  // l_L
  std::vector<double> M_k;
  std::vector<double> M_tilde_k;
  double M = 0.0;
  double D = 0.0;
  double f1_bound = 0.0;
  double f2_bound = 0.0;
  double alpha = 0.0;  // used only in the critical regime
};

struct FunctionBounds {
  double f1 = 0.0;
  double f2 = 0.0;
};

/// Requires omega_k + omega~_k < l_L / L_L for every region (else
/// HypothesisViolated) and 0 < alpha < 1.
SmoothnessReport compute_constants(const RifsModel& model, FunctionBounds bounds, double alpha = 0.1);

/// Sup of |f1| and |f2| measured on a grid, a data-dependent alternative to
/// the a priori bound.
FunctionBounds measured_bounds(const EvaluationGrid& grid) noexcept;

struct HolderEstimate {
  double tau1 = 1.0;
  double tau2 = 1.0;
  bool degenerate1 = false;
  bool degenerate2 = false;
  std::vector<double> scales;
  std::vector<double> osc1;
  std::vector<double> osc2;
};

/// Largest |f(x) - f(x')| over grid pairs with |x - x'| <= h.
std::vector<double> oscillations(std::span<const double> xs, std::span<const double> fs, std::span<const double> scales);

/// Dyadic spacings 2^-(p-10) ... 2^-(p-2) for a 2^p + 1 grid (never coarser
/// than 2^-2). The coarse end is cut because osc(h) saturates near the
/// range of f and flattens the fit; grids with p < 11 need explicit scales.
std::vector<double> default_scales(std::size_t resolution);

/// Least-squares slope of log osc(h) against log h, for f1 and f2. Needs at
/// least 4 scales spanning two decades (InsufficientScales otherwise).
HolderEstimate empirical_holder(const EvaluationGrid& grid, std::span<const double> scales);

}  // namespace hvrfif
