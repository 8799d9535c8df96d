#include "hvrfif/evaluator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iterator>
#include <random>

#include <fmt/format.h>

#include "hvrfif/error.hpp"

namespace hvrfif {

namespace {

double interpolate(const std::vector<double>& xs, const std::vector<double>& fs, double x) noexcept {
  x = std::clamp(x, xs.front(), xs.back());
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  auto m = static_cast<std::size_t>(std::distance(xs.begin(), it));
  m = std::clamp<std::size_t>(m, 1, xs.size() - 1) - 1;
  const double w = (x - xs[m]) / (xs[m + 1] - xs[m]);
  return (1.0 - w) * fs[m] + w * fs[m + 1];
}

// Region holding x; a shared node goes to the region on its left.
std::size_t region_of(const std::vector<double>& node_xs, double x) {
  auto it = std::upper_bound(node_xs.begin(), node_xs.end(), x);
  auto k = static_cast<std::size_t>(std::distance(node_xs.begin(), it));
  k = k == 0 ? 0 : k - 1;
  if (k > 0 && node_xs[k] == x) --k;
  return std::min(k, node_xs.size() - 2);
}

// Per-sample coefficients of one operator sweep; they do not change between
// sweeps because L^{-1}(x) and the factor values are fixed.
struct Stencil {
  std::size_t m = 0;
  double w = 0.0;
  double a1 = 0.0, b1 = 0.0, c1 = 0.0;
  double a2 = 0.0, b2 = 0.0, c2 = 0.0;
};

}  // namespace

double EvaluationGrid::value1(double x) const noexcept { return interpolate(xs, f1, x); }
double EvaluationGrid::value2(double x) const noexcept { return interpolate(xs, f2, x); }

std::vector<double> grid_abscissas(const ExtendedDataset& unit, std::size_t resolution) {
  if (resolution < 257 || !std::has_single_bit(resolution - 1))
    throw Error(ErrorCode::InvalidResolution,
                fmt::format("resolution must be 2^p + 1 with p >= 8, got {}", resolution));
  const double cells = static_cast<double>(resolution - 1);
  std::vector<double> xs(resolution);
  for (std::size_t j = 0; j < resolution; ++j) xs[j] = static_cast<double>(j) / cells;

  for (const auto& node : unit.nodes()) {
    // Snap a uniform point onto the node when they agree up to rounding.
    const auto j = static_cast<std::size_t>(std::lround(node.x * cells));
    if (std::abs(xs[j] - node.x) <= 1e-13)
      xs[j] = node.x;
    else
      xs.push_back(node.x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

EvaluationGrid solve_fixed_point(const RifsModel& model, const SolverOptions& options) {
  const auto& data = model.data();
  EvaluationGrid grid;
  grid.resolution = options.resolution;
  grid.tolerance = options.tolerance;
  grid.xs = grid_abscissas(data, options.resolution);
  const auto& xs = grid.xs;
  const std::size_t count = xs.size();

  std::vector<double> node_xs;
  for (const auto& n : data.nodes()) node_xs.push_back(n.x);

  std::vector<Stencil> stencil(count);
  grid.f1.resize(count);
  grid.f2.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double x = xs[j];
    const auto i = region_of(node_xs, x);
    const auto& r = model.region(i);
    const double u = std::clamp(r.L.inverse(x), r.domain_interval.lo, r.domain_interval.hi);

    auto& st = stencil[j];
    auto it = std::upper_bound(xs.begin(), xs.end(), u);
    st.m = std::clamp<std::size_t>(static_cast<std::size_t>(std::distance(xs.begin(), it)), 1, count - 1) - 1;
    st.w = std::clamp((u - xs[st.m]) / (xs[st.m + 1] - xs[st.m]), 0.0, 1.0);
    st.a1 = r.factors.s(x);
    st.b1 = r.factors.sp(x);
    st.c1 = r.q(u);
    st.a2 = r.factors.st(x);
    st.b2 = r.factors.stp(x);
    st.c2 = r.q_tilde(u);

    // Start from the chord interpolant of the nodes.
    grid.f1[j] = r.shift.h(x);
    grid.f2[j] = r.shift.h_hidden(x);
  }

  std::vector<double> next1(count), next2(count);
  for (;;) {
    double residual = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      const auto& st = stencil[j];
      const double v1 = (1.0 - st.w) * grid.f1[st.m] + st.w * grid.f1[st.m + 1];
      const double v2 = (1.0 - st.w) * grid.f2[st.m] + st.w * grid.f2[st.m + 1];
      next1[j] = st.a1 * v1 + st.b1 * v2 + st.c1;
      next2[j] = st.a2 * v1 + st.b2 * v2 + st.c2;
      residual = std::max(residual, std::abs(next1[j] - grid.f1[j]) + std::abs(next2[j] - grid.f2[j]));
    }
    grid.f1.swap(next1);
    grid.f2.swap(next2);
    ++grid.iterations;
    grid.residual = residual;
    grid.residual_history.push_back(residual);
    if (residual < options.tolerance) break;
    if (grid.iterations >= options.max_iterations)
      throw NoConvergenceError(fmt::format("residual {:.3e} after {} sweeps, tolerance {:.3e}", residual,
                                           grid.iterations, options.tolerance),
                               grid.residual_history);
  }

  // Linear interpolation only costs accuracy where a pulled-back point falls
  // strictly between samples; there the local second difference measures it.
  const auto bend = [&](std::size_t j) {
    if (j == 0 || j + 1 >= count) return 0.0;
    const double t = (xs[j] - xs[j - 1]) / (xs[j + 1] - xs[j - 1]);
    const double d1 = grid.f1[j] - ((1.0 - t) * grid.f1[j - 1] + t * grid.f1[j + 1]);
    const double d2 = grid.f2[j] - ((1.0 - t) * grid.f2[j - 1] + t * grid.f2[j + 1]);
    return std::abs(d1) + std::abs(d2);
  };
  for (const auto& st : stencil) {
    if (st.w < 1e-9 || st.w > 1.0 - 1e-9) continue;
    grid.discretization_estimate = std::max({grid.discretization_estimate, bend(st.m), bend(st.m + 1)});
  }
  const double floor = grid.discretization_estimate / (1.0 - model.metadata().s_bar);
  if (options.tolerance < floor)
    grid.warnings.push_back(fmt::format(
        "tolerance {:.3e} is below the estimated grid interpolation error {:.3e}; samples are accurate to about "
        "that level only",
        options.tolerance, floor));
  return grid;
}

OrbitSampleSet orbit_samples(const RifsModel& model, std::size_t max_depth) {
  OrbitSampleSet out;
  const auto& data = model.data();
  const auto& partition = model.partition();
  for (const auto& n : data.nodes()) out.samples.push_back({n.x, n.y, n.z, 0, -1, -1});

  std::size_t begin = 0;
  std::size_t end = out.samples.size();
  for (std::size_t depth = 1; depth <= max_depth; ++depth) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      for (std::size_t i = 0; i < model.region_count(); ++i) {
        const auto& r = model.region(i);
        const auto& d = partition.domain(r.domain);
        const OrbitSample s = out.samples[idx];
        bool inside = false;
        if (s.depth == 0) {
          // Domain end nodes map onto nodes, which are already present.
          inside = d.start < idx && idx < d.end;
        } else {
          inside = partition.region_in_domain(static_cast<std::size_t>(s.region), r.domain);
        }
        if (!inside) continue;
        const auto [f1, f2] = r.F(s.x, s.f1, s.f2);
        out.samples.push_back(
            {r.L(s.x), f1, f2, depth, static_cast<std::int64_t>(idx), static_cast<std::int64_t>(i)});
      }
    }
    begin = end;
    end = out.samples.size();
  }
  return out;
}

OrbitSampleSet chaos_game(const RifsModel& model, std::size_t n_points, std::uint64_t seed) {
  constexpr std::size_t burn_in = 100;
  const auto& m = model.connection();
  std::vector<std::vector<std::size_t>> next(model.region_count());
  for (std::size_t t = 0; t < next.size(); ++t) {
    next[t] = m.successors(t);
    if (next[t].empty())
      throw Error(ErrorCode::UnreachableRegion, fmt::format("region {} has no admissible successor", t + 1));
  }

  std::mt19937_64 rng(seed);
  OrbitSampleSet out;
  out.samples.reserve(n_points);
  const Node& start = model.data().node(0);
  double x = start.x, y = start.y, z = start.z;
  std::size_t t = 0;
  for (std::size_t step = 0; step < burn_in + n_points; ++step) {
    const auto& choices = next[t];
    std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
    const std::size_t i = choices[pick(rng)];
    const auto& r = model.region(i);
    const auto [f1, f2] = r.F(x, y, z);
    x = r.L(x);
    y = f1;
    z = f2;
    t = i;
    if (step >= burn_in) out.samples.push_back({x, y, z, step + 1, -1, static_cast<std::int64_t>(i)});
  }
  return out;
}

SupNormBound sup_norm_bound(const RifsModel& model) {
  double q = 0.0, q_tilde = 0.0;
  for (const auto& r : model.regions()) {
    q = std::max(q, r.shift.sup_q);
    q_tilde = std::max(q_tilde, r.shift.sup_q_tilde);
  }
  const double b = (q + q_tilde) / (1.0 - model.metadata().s_bar);
  return {b, b, b};
}

}  // namespace hvrfif
