#include "hvrfif/maps.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

#include "hvrfif/error.hpp"

namespace hvrfif {

AffineMap1D build_affine_map(Interval domain, Interval region, Orientation orientation) {
  if (!(region.length() < domain.length()))
    throw Error(ErrorCode::NotContractive, "region [" + std::to_string(region.lo) + ", " + std::to_string(region.hi) +
                                               "] is not shorter than its domain");
  AffineMap1D m;
  m.source = domain;
  m.target = region;
  const double ratio = region.length() / domain.length();
  if (orientation == Orientation::increasing) {
    m.slope = ratio;
    m.intercept = region.lo - ratio * domain.lo;
  } else {
    m.slope = -ratio;
    m.intercept = region.hi + ratio * domain.lo;
  }
  return m;
}

PiecewiseAffineMap::PiecewiseAffineMap(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() < 2 || knots_.size() != values_.size())
    throw Error(ErrorCode::IndexOutOfRange, "piecewise map needs matching knots/values, at least 2");
  for (std::size_t j = 1; j < knots_.size(); ++j) {
    if (!(knots_[j - 1] < knots_[j])) throw Error(ErrorCode::OrderViolated, "piecewise map knots must increase");
  }
  const bool up = values_.back() > values_.front();
  for (std::size_t j = 1; j < values_.size(); ++j) {
    if (up ? !(values_[j - 1] < values_[j]) : !(values_[j - 1] > values_[j]))
      throw Error(ErrorCode::OrderViolated, "piecewise map must be strictly monotone");
  }
}

PiecewiseAffineMap PiecewiseAffineMap::from_affine(const AffineMap1D& map) {
  const bool up = map.slope > 0.0;
  return PiecewiseAffineMap({map.source.lo, map.source.hi},
                            {up ? map.target.lo : map.target.hi, up ? map.target.hi : map.target.lo});
}

PiecewiseAffineMap PiecewiseAffineMap::identity(Interval on) {
  PiecewiseAffineMap m({on.lo, on.hi}, {on.lo, on.hi});
  m.identity_ = true;
  return m;
}

double PiecewiseAffineMap::operator()(double x) const noexcept {
  if (identity_) return x;
  auto it = std::upper_bound(knots_.begin() + 1, knots_.end() - 1, x);
  const auto j = static_cast<std::size_t>(std::distance(knots_.begin(), it)) - 1;
  if (x == knots_[j]) return values_[j];
  if (x == knots_[j + 1]) return values_[j + 1];
  const double t = (x - knots_[j]) / (knots_[j + 1] - knots_[j]);
  return values_[j] + t * (values_[j + 1] - values_[j]);
}

double PiecewiseAffineMap::inverse(double y) const noexcept {
  if (identity_) return y;
  const bool up = increasing();
  std::size_t j = 0;
  // Find the piece whose image holds y.
  const std::size_t last = values_.size() - 2;
  while (j < last && (up ? y > values_[j + 1] : y < values_[j + 1])) ++j;
  if (y == values_[j]) return knots_[j];
  if (y == values_[j + 1]) return knots_[j + 1];
  const double t = (y - values_[j]) / (values_[j + 1] - values_[j]);
  return knots_[j] + t * (knots_[j + 1] - knots_[j]);
}

PiecewiseAffineMap PiecewiseAffineMap::inverse_map() const {
  if (identity_) return *this;
  std::vector<double> k(values_), v(knots_);
  if (!increasing()) {
    std::reverse(k.begin(), k.end());
    std::reverse(v.begin(), v.end());
  }
  return PiecewiseAffineMap(std::move(k), std::move(v));
}

PiecewiseAffineMap PiecewiseAffineMap::restricted(Interval on) const {
  if (identity_) return identity(on);
  std::vector<double> k{on.lo};
  for (double knot : knots_) {
    if (knot > on.lo && knot < on.hi) k.push_back(knot);
  }
  k.push_back(on.hi);
  std::vector<double> v;
  v.reserve(k.size());
  for (double x : k) v.push_back((*this)(x));
  return PiecewiseAffineMap(std::move(k), std::move(v));
}

Interval PiecewiseAffineMap::target() const noexcept {
  return {std::min(values_.front(), values_.back()), std::max(values_.front(), values_.back())};
}

double PiecewiseAffineMap::max_slope() const noexcept {
  double m = 0.0;
  for (std::size_t j = 0; j + 1 < knots_.size(); ++j)
    m = std::max(m, std::abs((values_[j + 1] - values_[j]) / (knots_[j + 1] - knots_[j])));
  return m;
}

double PiecewiseAffineMap::mean_ratio() const noexcept { return target().length() / source().length(); }

PiecewiseAffineMap compose(const PiecewiseAffineMap& outer, const PiecewiseAffineMap& inner) {
  if (inner.is_identity() && outer.is_identity()) return PiecewiseAffineMap::identity(inner.source());
  std::vector<double> k(inner.knots().begin(), inner.knots().end());
  const auto img = inner.target();
  for (double knot : outer.knots()) {
    if (knot > img.lo && knot < img.hi) k.push_back(inner.inverse(knot));
  }
  std::sort(k.begin(), k.end());
  // Drop knots that coincide with a neighbour up to rounding; keep both ends.
  const double eps = 1e-14 * std::max(1.0, std::abs(k.back()));
  std::vector<double> merged{k.front()};
  for (std::size_t j = 1; j + 1 < k.size(); ++j) {
    if (k[j] - merged.back() > eps && k.back() - k[j] > eps) merged.push_back(k[j]);
  }
  merged.push_back(k.back());
  k = std::move(merged);
  std::vector<double> v;
  v.reserve(k.size());
  for (double x : k) v.push_back(outer(inner(x)));
  return PiecewiseAffineMap(std::move(k), std::move(v));
}

double Chord::sup_abs() const noexcept { return std::max(std::abs(v0), std::abs(v1)); }

}  // namespace hvrfif
