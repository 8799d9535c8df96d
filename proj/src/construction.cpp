#include "hvrfif/construction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "hvrfif/error.hpp"

namespace hvrfif {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational rational_from_string(const std::string& text) {
  try {
    const auto slash = text.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const auto num = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return Rational(num);
    }
    const auto num_text = text.substr(0, slash);
    const auto den_text = text.substr(slash + 1);
    const auto num = std::stoll(num_text, &used);
    if (used != num_text.size()) throw std::invalid_argument(text);
    const auto den = std::stoll(den_text, &used);
    if (used != den_text.size() || den == 0) throw std::invalid_argument(text);
    return Rational(num, den);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::ParseError, "not a rational: '" + text + "'");
  }
}

Rational ConnectionMatrix::row_sum(std::size_t s) const {
  Rational sum(0);
  for (std::size_t t = 0; t < n_; ++t) sum += (*this)(s, t);
  return sum;
}

std::vector<std::size_t> ConnectionMatrix::successors(std::size_t s) const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < n_; ++t) {
    if ((*this)(s, t) > Rational(0)) out.push_back(t);
  }
  return out;
}

ConnectionMatrix build_connection_matrix(const Partition& partition) {
  const std::size_t n = partition.region_count();
  ConnectionMatrix m(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::int64_t a_s = 0;
    for (std::size_t t = 0; t < n; ++t) {
      if (partition.region_in_domain(s, partition.gamma(t))) ++a_s;
    }
    if (a_s == 0)
      throw Error(ErrorCode::UnreachableRegion,
                  "region " + std::to_string(s + 1) + " lies in no domain used by any map");
    for (std::size_t t = 0; t < n; ++t) {
      if (partition.region_in_domain(s, partition.gamma(t))) m(s, t) = Rational(1, a_s);
    }
  }
  return m;
}

double RegionMap::q(double x) const noexcept {
  const double u = L(x);
  return -factors.s(u) * shift.g(x) - factors.sp(u) * shift.g_hidden(x) + shift.h(u);
}

double RegionMap::q_tilde(double x) const noexcept {
  const double u = L(x);
  return -factors.st(u) * shift.g(x) - factors.stp(u) * shift.g_hidden(x) + shift.h_hidden(u);
}

std::array<double, 2> RegionMap::F(double x, double y, double z) const noexcept {
  const double u = L(x);
  const double f1 = factors.s(u) * y + factors.sp(u) * z + q(x);
  const double f2 = factors.st(u) * y + factors.stp(u) * z + q_tilde(x);
  return {f1, f2};
}

ShiftPair build_shift_pair(const ExtendedDataset& ds, const Partition& partition, const RegionFactors& factors,
                           const PiecewiseAffineMap& L, std::size_t i) {
  const auto& d = partition.domain(partition.gamma(i));
  const Node& a = ds.node(d.start);
  const Node& b = ds.node(d.end);
  const Node& lo = ds.node(i);
  const Node& hi = ds.node(i + 1);

  ShiftPair sp;
  sp.g = {a.x, b.x, a.y, b.y};
  sp.g_hidden = {a.x, b.x, a.z, b.z};
  sp.h = {lo.x, hi.x, lo.y, hi.y};
  sp.h_hidden = {lo.x, hi.x, lo.z, hi.z};

  // Product/chain rule bound on q = -s(L) g - s'(L) g' + h(L), r = Lip(L).
  const double r = L.max_slope();
  const auto lip = [&](const FactorFunction& f1, const FactorFunction& f2, const Chord& region_chord) {
    return f1.lipschitz() * r * sp.g.sup_abs() + f1.sup_abs() * std::abs(sp.g.slope()) +
           f2.lipschitz() * r * sp.g_hidden.sup_abs() + f2.sup_abs() * std::abs(sp.g_hidden.slope()) +
           std::abs(region_chord.slope()) * r;
  };
  sp.lipschitz_q = lip(factors.s, factors.sp, sp.h);
  sp.lipschitz_q_tilde = lip(factors.st, factors.stp, sp.h_hidden);
  sp.sup_q = factors.s.sup_abs() * sp.g.sup_abs() + factors.sp.sup_abs() * sp.g_hidden.sup_abs() + sp.h.sup_abs();
  sp.sup_q_tilde =
      factors.st.sup_abs() * sp.g.sup_abs() + factors.stp.sup_abs() * sp.g_hidden.sup_abs() + sp.h_hidden.sup_abs();
  return sp;
}

std::array<double, 2> eval_F(const RifsModel& model, std::size_t i, double x, double y, double z) {
  if (i >= model.region_count()) throw Error(ErrorCode::IndexOutOfRange, "no region " + std::to_string(i + 1));
  const auto& r = model.region(i);
  if (!r.domain_interval.contains(x, 1e-12))
    throw Error(ErrorCode::OutOfDomain,
                "x = " + std::to_string(x) + " outside the domain of region " + std::to_string(i + 1));
  return r.F(x, y, z);
}

RifsModel assemble_with_maps(const ExtendedDataset& unit, const ExtendedDataset& source, const Partition& partition,
                             const FactorSet& unit_factors, const FactorSet& source_factors,
                             std::vector<PiecewiseAffineMap> maps) {
  const std::size_t n = unit.regions();
  if (partition.region_count() != n || unit_factors.size() != n || maps.size() != n)
    throw Error(ErrorCode::IndexOutOfRange, "model parts disagree on the region count");

  const auto check = s_bar_matrix_norm(unit_factors);
  if (!check.contraction_ok)
    throw Error(ErrorCode::ContractionHypothesisViolated,
                "contraction hypothesis S_bar < 1 fails: S_bar = " + std::to_string(check.s_bar));

  RifsModel model(unit, source, partition, unit_factors, source_factors);
  model.scale_ = source.unit_scale();
  model.connection_ = build_connection_matrix(partition);

  auto& meta = model.metadata_;
  meta.s_bar = check.s_bar;
  meta.ratio_max = 0.0;
  meta.ratio_min = std::numeric_limits<double>::infinity();
  meta.region_min = std::numeric_limits<double>::infinity();
  meta.domain_min = std::numeric_limits<double>::infinity();
  meta.domain_max = 0.0;
  for (std::size_t k = 0; k < partition.domain_count(); ++k) {
    const auto& d = partition.domain(k);
    const double len = unit.node(d.end).x - unit.node(d.start).x;
    meta.domain_min = std::min(meta.domain_min, len);
    meta.domain_max = std::max(meta.domain_max, len);
  }

  const double data_scale = std::max(1.0, unit.max_abs_y() + unit.max_abs_z());
  model.regions_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = partition.gamma(i);
    const auto& d = partition.domain(k);
    const Interval dom{unit.node(d.start).x, unit.node(d.end).x};
    const Interval reg = unit.region(i);
    auto& L = maps[i];
    if (L.source().lo != dom.lo || L.source().hi != dom.hi || L.target().lo != reg.lo || L.target().hi != reg.hi)
      throw Error(ErrorCode::EndpointConditionViolated,
                  "map of region " + std::to_string(i + 1) + " does not take its domain onto the region");

    RegionMap rm{k, dom, reg, std::move(L), unit_factors.row(i), {}};
    rm.shift = build_shift_pair(unit, partition, rm.factors, rm.L, i);

    // Domain end nodes must land on the region end nodes.
    for (const std::size_t alpha : {d.start, d.end}) {
      const Node& src = unit.node(alpha);
      const double image = rm.L(src.x);
      const Node& dst = image == reg.lo ? unit.node(i) : unit.node(i + 1);
      const auto [f1, f2] = rm.F(src.x, src.y, src.z);
      if (std::abs(f1 - dst.y) > 1e-12 * data_scale || std::abs(f2 - dst.z) > 1e-12 * data_scale)
        throw Error(ErrorCode::EndpointConditionViolated,
                    "region " + std::to_string(i + 1) + ": node " + std::to_string(alpha) +
                        " is not mapped onto the region end data");
    }

    const double ratio = reg.length() / dom.length();
    meta.ratio_max = std::max(meta.ratio_max, ratio);
    meta.ratio_min = std::min(meta.ratio_min, ratio);
    meta.region_min = std::min(meta.region_min, reg.length());
    model.regions_.push_back(std::move(rm));
  }
  return model;
}

RifsModel assemble(const ExtendedDataset& ds, const PartitionSpec& spec, const FactorSet& factors) {
  const auto partition = validate_partition(ds, spec);
  if (factors.size() != ds.regions())
    throw Error(ErrorCode::IndexOutOfRange, "factor rows: " + std::to_string(factors.size()) + " given, " +
                                                std::to_string(ds.regions()) + " regions");
  const auto check = s_bar_matrix_norm(factors);
  if (!check.contraction_ok)
    throw Error(ErrorCode::ContractionHypothesisViolated,
                "contraction hypothesis S_bar < 1 fails: S_bar = " + std::to_string(check.s_bar));

  const auto unit = ds.to_unit();
  const auto scale = ds.unit_scale();

  std::vector<RegionFactors> unit_rows;
  unit_rows.reserve(ds.regions());
  for (std::size_t i = 0; i < ds.regions(); ++i) {
    const auto& row = factors.row(i);
    const auto on = unit.region(i);
    const auto pull = [&](const FactorFunction& f) { return f.pulled_back(scale.span, scale.origin, on); };
    unit_rows.push_back({pull(row.s), pull(row.sp), pull(row.st), pull(row.stp)});
  }

  std::vector<PiecewiseAffineMap> maps;
  maps.reserve(ds.regions());
  for (std::size_t i = 0; i < ds.regions(); ++i) {
    const auto& d = partition.domain(partition.gamma(i));
    const Interval dom{unit.node(d.start).x, unit.node(d.end).x};
    maps.push_back(PiecewiseAffineMap::from_affine(build_affine_map(dom, unit.region(i), partition.orientation(i))));
  }
  return assemble_with_maps(unit, ds, partition, FactorSet(std::move(unit_rows)), factors, std::move(maps));
}

}  // namespace hvrfif
