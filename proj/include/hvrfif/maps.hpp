#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hvrfif/model.hpp"

namespace hvrfif {

/// x -> slope * x + intercept, taking `source` onto `target`.
struct AffineMap1D {
  double slope = 1.0;
  double intercept = 0.0;
  Interval source;
  Interval target;

  double operator()(double x) const noexcept { return slope * x + intercept; }
  double inverse(double y) const noexcept { return (y - intercept) / slope; }
};

/// Affine map from `domain` onto `region`; increasing sends domain.lo to
/// region.lo, decreasing sends it to region.hi.
AffineMap1D build_affine_map(Interval domain, Interval region, Orientation orientation);

/// Continuous, strictly monotone, piecewise-affine map given by its values
/// at ascending knots. Knot images are reproduced exactly.
class PiecewiseAffineMap {
 public:
  PiecewiseAffineMap(std::vector<double> knots, std::vector<double> values);

  static PiecewiseAffineMap from_affine(const AffineMap1D& map);
  static PiecewiseAffineMap identity(Interval on);

  double operator()(double x) const noexcept;
  double inverse(double y) const noexcept;
  PiecewiseAffineMap inverse_map() const;
  /// The map restricted to `on` (a sub-interval of the source).
  PiecewiseAffineMap restricted(Interval on) const;

  Interval source() const noexcept { return {knots_.front(), knots_.back()}; }
  Interval target() const noexcept;
  bool increasing() const noexcept { return values_.back() > values_.front(); }
  bool is_identity() const noexcept { return identity_; }
  std::size_t pieces() const noexcept { return knots_.size() - 1; }
  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Largest |slope| over all pieces.
  double max_slope() const noexcept;
  /// |target| / |source|
  double mean_ratio() const noexcept;

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  bool identity_ = false;
};

/// outer o inner on inner's source; inner's image must lie in outer's source.
PiecewiseAffineMap compose(const PiecewiseAffineMap& outer, const PiecewiseAffineMap& inner);

/// Straight line through (x0, v0) and (x1, v1).
struct Chord {
  double x0 = 0.0;
  double x1 = 1.0;
  double v0 = 0.0;
  double v1 = 0.0;

  double operator()(double x) const noexcept {
    return (x - x0) / (x1 - x0) * v1 + (x - x1) / (x0 - x1) * v0;
  }
  double slope() const noexcept { return (v1 - v0) / (x1 - x0); }
  double sup_abs() const noexcept;
};

}  // namespace hvrfif
