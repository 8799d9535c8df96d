#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hvrfif/error.hpp"
#include "hvrfif/evaluator.hpp"
#include "hvrfif/smoothness.hpp"
#include "support/systems.hpp"

using namespace hvrfif;

namespace {

double chord_at(const ExtendedDataset& d, double x, bool hidden) {
  for (std::size_t i = 0; i < d.regions(); ++i) {
    const Node &a = d.node(i), &b = d.node(i + 1);
    if (x <= b.x) {
      const double t = (x - a.x) / (b.x - a.x);
      return hidden ? a.z + t * (b.z - a.z) : a.y + t * (b.y - a.y);
    }
  }
  return hidden ? d.nodes().back().z : d.nodes().back().y;
}

std::vector<std::vector<double>> transition(const RifsModel& m) {
  const auto& cm = m.connection();
  std::vector<std::vector<double>> P(cm.size(), std::vector<double>(cm.size()));
  for (std::size_t s = 0; s < cm.size(); ++s)
    for (std::size_t t = 0; t < cm.size(); ++t)
      P[s][t] = boost::rational_cast<double>(cm(s, t));
  return P;
}

std::vector<double> step(const std::vector<double>& v, const std::vector<std::vector<double>>& P) {
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t s = 0; s < v.size(); ++s)
    for (std::size_t t = 0; t < v.size(); ++t) out[t] += v[s] * P[s][t];
  return out;
}

}  // namespace

TEST(Grid, ContainsNodesAndRejectsBadResolution) {
  const auto m = systems::irregular7();
  const auto xs = grid_abscissas(m.data(), 257);
  for (const auto& n : m.data().nodes()) EXPECT_TRUE(std::binary_search(xs.begin(), xs.end(), n.x));
  EXPECT_TRUE(std::is_sorted(xs.begin(), xs.end()));
  for (std::size_t r : {0u, 129u, 1000u, 4096u}) {
    try {
      grid_abscissas(m.data(), r);
      ADD_FAILURE() << r;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidResolution);
    }
  }
}

TEST(Solve, ZeroFactorsGiveChordInterpolantInOneSweep) {
  std::mt19937_64 rng(4);
  systems::RandomSystemOptions opt;
  opt.s_bar_max = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = systems::random_system(rng, opt);
    const auto g = solve_fixed_point(m, {1025, 1e-10, 10});
    EXPECT_EQ(g.iterations, 1u);
    for (std::size_t j = 0; j < g.xs.size(); ++j) {
      EXPECT_NEAR(g.f1[j], chord_at(m.data(), g.xs[j], false), 1e-12);
      EXPECT_NEAR(g.f2[j], chord_at(m.data(), g.xs[j], true), 1e-12);
    }
  }
}

TEST(Solve, InterpolatesNodes) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = systems::random_system(rng);
    const auto g = solve_fixed_point(m, {1025, 1e-11, 2000});
    for (const auto& n : m.data().nodes()) {
      EXPECT_NEAR(g.value1(n.x), n.y, 1e-9);
      EXPECT_NEAR(g.value2(n.x), n.z, 1e-9);
    }
  }
}

TEST(Solve, ContractionRateForConstantFactors) {
  const auto m = systems::irregular7();
  const auto g = solve_fixed_point(m, {4097, 1e-10, 1000});
  const auto& r = g.residual_history;
  ASSERT_GE(r.size(), 2u);
  for (std::size_t k = 1; k < r.size(); ++k) {
    EXPECT_LE(r[k], (m.metadata().s_bar + 0.05) * r[k - 1]) << k;
    EXPECT_LE(r[k], r[k - 1]);
  }

  const auto u = systems::uniform5(0.3);
  const auto gu = solve_fixed_point(u, {4097, 1e-10, 1000});
  const double r0 = gu.residual_history.front();
  const auto cap = static_cast<std::size_t>(std::ceil(std::log(1e-10 / r0) / std::log(0.6))) + 2;
  EXPECT_LE(gu.iterations, cap);
  for (std::size_t k = 1; k < gu.residual_history.size(); ++k)
    EXPECT_LE(gu.residual_history[k], 0.62 * gu.residual_history[k - 1]);
}

TEST(Solve, NoConvergenceReportsHistory) {
  const auto m = systems::irregular7();
  try {
    solve_fixed_point(m, {1025, 1e-14, 3});
    FAIL();
  } catch (const NoConvergenceError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
    EXPECT_EQ(e.residuals().size(), 3u);
  }
}

TEST(Solve, WarnsWhenToleranceIsBelowInterpolationError) {
  const auto g = solve_fixed_point(systems::irregular7(), {257, 1e-12, 1000});
  EXPECT_GT(g.discretization_estimate, 0.0);
  EXPECT_FALSE(g.warnings.empty());
  // Dyadic maps pull grid points back onto grid points: nothing to warn about.
  const auto d = solve_fixed_point(systems::uniform5(0.3), {257, 1e-12, 1000});
  EXPECT_EQ(d.discretization_estimate, 0.0);
  EXPECT_TRUE(d.warnings.empty());
}

TEST(SupNorm, Examples) {
  const auto zero = systems::uniform5(0.0);
  EXPECT_DOUBLE_EQ(sup_norm_bound(zero).combined, 1.5);

  for (const auto& m : {systems::uniform5(0.3), systems::irregular7(), systems::uniform5_decreasing()}) {
    const auto b = sup_norm_bound(m);
    const auto g = solve_fixed_point(m, {2049, 1e-11, 2000});
    for (std::size_t j = 0; j < g.xs.size(); ++j) EXPECT_LE(std::abs(g.f1[j]) + std::abs(g.f2[j]), b.combined);
    EXPECT_EQ(b.f1, b.combined);
  }

  const auto ds = validate_dataset({{0, 0, 0}, {0.25, 0, 0}, {0.5, 0, 0}, {0.75, 0, 0}, {1, 0, 0}});
  const auto flat = assemble(ds, systems::uniform5_partition(), constant_factors(ds, 0.3, 0.2, 0.1, 0.4));
  EXPECT_EQ(sup_norm_bound(flat).combined, 0.0);
  const auto g = solve_fixed_point(flat, {257, 1e-12, 100});
  for (double v : g.f1) EXPECT_EQ(v, 0.0);
}

TEST(Orbit, DepthZeroIsTheNodes) {
  const auto m = systems::irregular7();
  const auto o = orbit_samples(m, 0);
  ASSERT_EQ(o.samples.size(), m.data().nodes().size());
  for (std::size_t j = 0; j < o.samples.size(); ++j) {
    EXPECT_EQ(o.samples[j].x, m.data().node(j).x);
    EXPECT_EQ(o.samples[j].f1, m.data().node(j).y);
    EXPECT_EQ(o.samples[j].depth, 0u);
  }
}

TEST(Orbit, DepthOneImagesAndFixedPointEquation) {
  const auto m = systems::irregular7();
  const auto o = orbit_samples(m, 3);
  for (const auto& s : o.samples) {
    if (s.depth == 0) continue;
    const auto& parent = o.samples[static_cast<std::size_t>(s.parent)];
    const auto i = static_cast<std::size_t>(s.region);
    const auto& r = m.region(i);
    EXPECT_TRUE(r.domain_interval.contains(parent.x, 1e-15));
    EXPECT_EQ(s.x, r.L(parent.x));
    if (s.depth == 1) {
      const auto [f1, f2] = eval_F(m, i, parent.x, parent.f1, parent.f2);
      EXPECT_EQ(s.f1, f1);
      EXPECT_EQ(s.f2, f2);
    }
    const double u = s.x;
    const auto& f = r.factors;
    EXPECT_NEAR(s.f1 - (f.s(u) * parent.f1 + f.sp(u) * parent.f2 + r.q(parent.x)), 0.0, 1e-12);
  }
}

TEST(Orbit, AgreesWithGrid) {
  for (const auto& m : {systems::uniform5(0.3), systems::irregular7(), systems::uniform5_decreasing()}) {
    const auto g = solve_fixed_point(m, {4097, 1e-10, 1000});
    const auto o = orbit_samples(m, 6);
    double worst = 0.0;
    for (const auto& s : o.samples) {
      worst = std::max(worst, std::abs(g.value1(s.x) - s.f1));
      worst = std::max(worst, std::abs(g.value2(s.x) - s.f2));
    }
    EXPECT_LE(worst, 1e-3);
  }
}

TEST(Chaos, EmptyAndInsideInterval) {
  const auto m = systems::irregular7();
  EXPECT_TRUE(chaos_game(m, 0, 1).samples.empty());
  const auto c = chaos_game(m, 5000, 7);
  ASSERT_EQ(c.samples.size(), 5000u);
  for (const auto& s : c.samples) {
    EXPECT_GE(s.x, 0.0);
    EXPECT_LE(s.x, 1.0);
  }
  const auto again = chaos_game(m, 5000, 7);
  for (std::size_t j = 0; j < 5000; ++j) EXPECT_EQ(c.samples[j].f1, again.samples[j].f1);
}

TEST(Chaos, RegionHistogramMatchesStationaryDistribution) {
  for (const auto& m : {systems::uniform5(0.3), systems::irregular7()}) {
    const auto P = transition(m);
    const std::size_t n = P.size();
    std::vector<double> pi(n, 1.0 / static_cast<double>(n));
    for (int k = 0; k < 5000; ++k) pi = step(pi, P);

    constexpr std::size_t N = 100000;
    const auto c = chaos_game(m, N, 2024);
    std::vector<double> count(n, 0.0);
    for (const auto& s : c.samples) count[static_cast<std::size_t>(s.region)] += 1.0;

    for (std::size_t i = 0; i < n; ++i) {
      // Asymptotic variance of a Markov-chain occupation frequency.
      std::vector<double> e(n, 0.0);
      e[i] = 1.0;
      double tau = pi[i] * (1.0 - pi[i]);
      for (int k = 1; k < 400; ++k) {
        e = step(e, P);
        tau += 2.0 * pi[i] * (e[i] - pi[i]);
      }
      const double sigma = std::sqrt(std::max(tau, 1e-12) / N);
      EXPECT_LE(std::abs(count[i] / N - pi[i]), 3.0 * sigma) << "region " << i;
    }
  }
}

TEST(Chaos, SamplesLieOnTheGridCurve) {
  // f1 is rough, so linear interpolation between grid points is only good to
  // the oscillation of f1 over one grid spacing.
  const auto m = systems::uniform5(0.3);
  const auto g = solve_fixed_point(m, {4097, 1e-10, 1000});
  const double spacing = 1.0 / 4096;
  const double slack = oscillations(g.xs, g.f1, std::vector<double>{2.0 * spacing}).front();
  const auto c = chaos_game(m, 20000, 3);
  std::size_t close = 0;
  for (const auto& s : c.samples)
    if (std::abs(g.value1(s.x) - s.f1) <= slack) ++close;
  EXPECT_GE(static_cast<double>(close), 0.99 * static_cast<double>(c.samples.size())) << slack;
}
