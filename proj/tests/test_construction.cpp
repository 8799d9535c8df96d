#include <random>

#include <gtest/gtest.h>

#include "hvrfif/construction.hpp"
#include "hvrfif/error.hpp"
#include "support/systems.hpp"

using namespace hvrfif;

namespace {

// p_st support by comparing coordinates rather than node indices.
bool contained_by_coordinates(const RifsModel& m, std::size_t s, std::size_t t) {
  const auto& data = m.data();
  const auto& d = m.partition().domain(m.partition().gamma(t));
  return data.node(d.start).x <= data.node(s).x && data.node(s + 1).x <= data.node(d.end).x;
}

double factor_value(const FactorFunction& f, double u) {
  const auto& p = f.spec().params;
  if (f.family() == FactorFamily::constant) return p[0];
  return p[0] + p[1] * (u - f.domain().lo);
}

// F_i computed from node data only, without the model's chords or maps.
std::array<double, 2> direct_F(const RifsModel& m, std::size_t i, double x, double y, double z) {
  const auto& data = m.data();
  const auto& part = m.partition();
  const auto& d = part.domain(part.gamma(i));
  const Node &a = data.node(d.start), &b = data.node(d.end), &lo = data.node(i), &hi = data.node(i + 1);
  const double t = (x - a.x) / (b.x - a.x);
  const double u = part.orientation(i) == Orientation::increasing ? lo.x + t * (hi.x - lo.x)
                                                                   : hi.x - t * (hi.x - lo.x);
  const double r = (u - lo.x) / (hi.x - lo.x);
  const double g = a.y + t * (b.y - a.y), gz = a.z + t * (b.z - a.z);
  const double h = lo.y + r * (hi.y - lo.y), hz = lo.z + r * (hi.z - lo.z);
  const auto& f = m.factors().row(i);
  return {factor_value(f.s, u) * (y - g) + factor_value(f.sp, u) * (z - gz) + h,
          factor_value(f.st, u) * (y - g) + factor_value(f.stp, u) * (z - gz) + hz};
}

}  // namespace

TEST(Connection, FiveNodeExample) {
  const auto m = systems::uniform5(0.3);
  const Rational half(1, 2), zero(0);
  const std::vector<std::vector<Rational>> expected = {
      {half, zero, half, zero}, {half, zero, half, zero}, {zero, half, zero, half}, {zero, half, zero, half}};
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(m.connection()(s, t), expected[s][t]) << s << "," << t;
}

TEST(Connection, OverlappingDomains) {
  const auto ds = validate_dataset({{0, 0, 0}, {1, 1, 0}, {2, 0, 1}, {3, 1, 1}});
  PartitionSpec spec;
  spec.domains = {{0, 2}, {1, 3}};
  spec.gamma = {0, 0, 1};
  const auto m = build_connection_matrix(validate_partition(ds, spec));
  EXPECT_EQ(m(0, 0), Rational(1, 2));
  EXPECT_EQ(m(0, 2), Rational(0));
  EXPECT_EQ(m(1, 1), Rational(1, 3));
  EXPECT_EQ(m(2, 2), Rational(1));
  for (std::size_t s = 0; s < 3; ++s) EXPECT_EQ(m.row_sum(s), Rational(1));
}

TEST(Connection, SingleDomainIsUniform) {
  const auto ds = validate_dataset({{0, 0, 0}, {1, 1, 0}, {2, 0, 1}, {3, 1, 1}});
  PartitionSpec spec;
  spec.domains = {{0, 3}};
  spec.gamma = {0, 0, 0};
  spec.allow_single_domain = true;
  const auto m = build_connection_matrix(validate_partition(ds, spec));
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(m(s, t), Rational(1, 3));
}

TEST(Connection, UnreachableRegion) {
  const auto ds = validate_dataset({{0, 0, 0}, {1, 1, 0}, {2, 0, 1}, {3, 1, 1}, {4, 0, 0}});
  PartitionSpec spec;
  spec.domains = {{0, 2}, {2, 4}};
  spec.gamma = {0, 0, 0, 0};  // nothing maps from the second domain
  try {
    build_connection_matrix(validate_partition(ds, spec));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnreachableRegion);
  }
}

TEST(Connection, RandomPartitionsRowStochasticWithBruteForceSupport) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = systems::random_system(rng);
    const auto& cm = m.connection();
    for (std::size_t s = 0; s < cm.size(); ++s) {
      EXPECT_EQ(cm.row_sum(s), Rational(1));
      for (std::size_t t = 0; t < cm.size(); ++t)
        EXPECT_EQ(cm(s, t) > Rational(0), contained_by_coordinates(m, s, t));
    }
  }
}

TEST(Rational, StringRoundTrip) {
  EXPECT_EQ(to_string(Rational(1, 2)), "1/2");
  EXPECT_EQ(to_string(Rational(1)), "1");
  EXPECT_EQ(to_string(Rational(0)), "0");
  EXPECT_EQ(rational_from_string("3/9"), Rational(1, 3));
  EXPECT_EQ(rational_from_string("1"), Rational(1));
  EXPECT_THROW(rational_from_string("1/0"), Error);
  EXPECT_THROW(rational_from_string("a/b"), Error);
}

TEST(Assemble, FiveNodeMetadata) {
  const auto m = systems::uniform5(0.3);
  EXPECT_DOUBLE_EQ(m.metadata().s_bar, 0.6);
  EXPECT_DOUBLE_EQ(m.metadata().ratio_max, 0.5);
  EXPECT_DOUBLE_EQ(m.metadata().ratio_min, 0.5);
  EXPECT_DOUBLE_EQ(m.metadata().domain_min, 0.5);
  EXPECT_DOUBLE_EQ(m.metadata().region_min, 0.25);
}

TEST(Assemble, RefusesSBarAtLeastOne) {
  const auto ds = systems::uniform5_data();
  try {
    assemble(ds, systems::uniform5_partition(), constant_factors(ds, 0.5, 0.0, 0.6, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ContractionHypothesisViolated);
    EXPECT_NE(std::string(e.what()).find("S_bar < 1"), std::string::npos);
  }
}

TEST(Assemble, ZeroFactorShiftIsRegionChord) {
  const auto m = systems::uniform5(0.0);
  const auto& r = m.region(1);
  for (double x : {0.5, 0.6, 0.8, 1.0}) EXPECT_DOUBLE_EQ(r.q(x), r.shift.h(r.L(x)));
  const auto a = eval_F(m, 1, 0.7, 5.0, -3.0);
  const auto b = eval_F(m, 1, 0.7, -2.0, 8.0);
  EXPECT_EQ(a, b);
}

TEST(Assemble, ShiftAtDomainStart) {
  const auto ds = validate_dataset({{0, 0.7, -0.4}, {0.25, 1, 0.5}, {0.5, 0, -0.5}, {0.75, 1, 0.5}, {1, 0, 0}});
  const auto m = assemble(ds, systems::uniform5_partition(), constant_factors(ds, 0.3, 0.3, 0.3, 0.3));
  EXPECT_NEAR(m.region(0).q(0.0), 0.7 - 0.3 * 0.7 - 0.3 * -0.4, 1e-15);
}

TEST(Assemble, EndpointConditionsHoldWithDecreasingMaps) {
  const auto m = systems::uniform5_decreasing();
  for (std::size_t i = 0; i < m.region_count(); ++i) {
    const auto& r = m.region(i);
    const auto& d = m.partition().domain(r.domain);
    for (const std::size_t a : {d.start, d.end}) {
      const Node& src = m.data().node(a);
      const double image = r.L(src.x);
      const Node& dst = image == r.region_interval.lo ? m.data().node(i) : m.data().node(i + 1);
      const auto [f1, f2] = eval_F(m, i, src.x, src.y, src.z);
      EXPECT_NEAR(f1, dst.y, 1e-12);
      EXPECT_NEAR(f2, dst.z, 1e-12);
    }
  }
  EXPECT_EQ(m.region(0).L(0.0), 0.25);
}

TEST(Assemble, EndpointConditionsOnRandomSystems) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = systems::random_system(rng);
    for (std::size_t i = 0; i < m.region_count(); ++i) {
      const auto& r = m.region(i);
      const auto& d = m.partition().domain(r.domain);
      const bool inc = m.partition().orientation(i) == Orientation::increasing;
      const Node& a = m.data().node(d.start);
      const Node& b = m.data().node(d.end);
      const auto fa = eval_F(m, i, a.x, a.y, a.z);
      const auto fb = eval_F(m, i, b.x, b.y, b.z);
      const Node& ia = m.data().node(inc ? i : i + 1);
      const Node& ib = m.data().node(inc ? i + 1 : i);
      EXPECT_NEAR(fa[0], ia.y, 1e-12);
      EXPECT_NEAR(fa[1], ia.z, 1e-12);
      EXPECT_NEAR(fb[0], ib.y, 1e-12);
      EXPECT_NEAR(fb[1], ib.z, 1e-12);
    }
  }
}

TEST(EvalF, MatchesIndependentFormula) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0), v(-2.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = systems::random_system(rng);
    for (int j = 0; j < 50; ++j) {
      const std::size_t i = static_cast<std::size_t>(u(rng) * static_cast<double>(m.region_count()));
      const auto dom = m.region(i).domain_interval;
      const double x = dom.lo + u(rng) * dom.length();
      const double y = v(rng), z = v(rng);
      const auto got = eval_F(m, i, x, y, z);
      const auto want = direct_F(m, i, x, y, z);
      EXPECT_NEAR(got[0], want[0], 1e-14);
      EXPECT_NEAR(got[1], want[1], 1e-14);
    }
  }
}

TEST(EvalF, LipschitzInOrdinatesBySBar) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0), v(-3.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = systems::random_system(rng);
    const double sbar = m.metadata().s_bar;
    for (int j = 0; j < 100; ++j) {
      const std::size_t i = static_cast<std::size_t>(u(rng) * static_cast<double>(m.region_count()));
      const auto dom = m.region(i).domain_interval;
      const double x = dom.lo + u(rng) * dom.length();
      const double y1 = v(rng), z1 = v(rng), y2 = v(rng), z2 = v(rng);
      const auto a = eval_F(m, i, x, y1, z1);
      const auto b = eval_F(m, i, x, y2, z2);
      EXPECT_LE(std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]),
                sbar * (std::abs(y1 - y2) + std::abs(z1 - z2)) + 1e-13);
    }
  }
}

TEST(EvalF, OutOfDomain) {
  const auto m = systems::uniform5(0.3);
  EXPECT_NO_THROW(eval_F(m, 0, 0.5 + 5e-13, 0, 0));
  try {
    eval_F(m, 0, 0.6, 0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfDomain);
  }
  EXPECT_THROW(eval_F(m, 7, 0.1, 0, 0), Error);
}

TEST(Shift, LipschitzBoundHoldsOnSamples) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = systems::random_system(rng);
    for (const auto& r : m.regions()) {
      const auto d = r.domain_interval;
      const double h = d.length() / 2000;
      for (int j = 0; j < 2000; ++j) {
        const double x0 = d.lo + j * h, x1 = x0 + h;
        EXPECT_LE(std::abs(r.q(x1) - r.q(x0)), r.shift.lipschitz_q * h * (1 + 1e-9) + 1e-15);
        EXPECT_LE(std::abs(r.q_tilde(x1) - r.q_tilde(x0)), r.shift.lipschitz_q_tilde * h * (1 + 1e-9) + 1e-15);
        EXPECT_LE(std::abs(r.q(x0)), r.shift.sup_q + 1e-14);
      }
    }
  }
}
