#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hvrfif/construction.hpp"

namespace hvrfif {

struct SolverOptions {
  /// Uniform samples, 2^p + 1 with p >= 8.
  std::size_t resolution = 4097;
  double tolerance = 1e-10;
  std::size_t max_iterations = 1000;
};

/// Fixed point (f1, f2) sampled on the unit interval.
struct EvaluationGrid {
  std::vector<double> xs;
  std::vector<double> f1;
  std::vector<double> f2;
  std::size_t resolution = 0;
  std::size_t iterations = 0;
  double tolerance = 0.0;
  double residual = 0.0;
  std::vector<double> residual_history;
  /// Largest deviation of a sample from the chord of its neighbours, taken
  /// where the sweep interpolates between samples (0 when it never does).
  double discretization_estimate = 0.0;
  std::vector<std::string> warnings;

  /// Linear interpolation between samples; x is clamped to [0, 1].
  double value1(double x) const noexcept;
  double value2(double x) const noexcept;
};

/// Sample points of the grid: the uniform dyadic points merged with every
/// node abscissa (domain ends are nodes).
std::vector<double> grid_abscissas(const ExtendedDataset& unit, std::size_t resolution);

/// Iterates the Read-Bajraktarevic operator from the nodal chord
/// interpolant until the sweep residual drops below the tolerance.
/// Throws NoConvergenceError after max_iterations sweeps.
EvaluationGrid solve_fixed_point(const RifsModel& model, const SolverOptions& options = {});

struct OrbitSample {
  double x = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  std::size_t depth = 0;
  /// Index of the sample this one was mapped from, -1 for nodes.
  std::int64_t parent = -1;
  /// Region whose map produced the sample, -1 for nodes.
  std::int64_t region = -1;
};

struct OrbitSampleSet {
  std::vector<OrbitSample> samples;
};

/// Exact graph points: the nodes pushed forward through every admissible
/// W_i, frontier by frontier, up to `max_depth` compositions.
OrbitSampleSet orbit_samples(const RifsModel& model, std::size_t max_depth);

/// Random recurrent iteration driven by the connection matrix, started
/// from the first node. Emits `n_points` samples after a 100 step burn-in.
OrbitSampleSet chaos_game(const RifsModel& model, std::size_t n_points, std::uint64_t seed);

struct SupNormBound {
  /// Bound on sup_x (|f1(x)| + |f2(x)|); each component is bounded by it too.
  double combined = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
};

SupNormBound sup_norm_bound(const RifsModel& model);

}  // namespace hvrfif
