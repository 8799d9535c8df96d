#pragma once

// Assembly of the recurrent system {R^3; M; W_i}: the maps L_i from each
// region's domain onto the region, the shift functions q, q~ built from data
// chords, the vertical maps F_i and the row-stochastic connection matrix.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "hvrfif/maps.hpp"
#include "hvrfif/model.hpp"

namespace hvrfif {

using Rational = boost::rational<std::int64_t>;

std::string to_string(const Rational& r);
Rational rational_from_string(const std::string& text);

class ConnectionMatrix {
 public:
  ConnectionMatrix() = default;
  explicit ConnectionMatrix(std::size_t n) : n_(n), p_(n * n, Rational(0)) {}

  std::size_t size() const noexcept { return n_; }
  const Rational& operator()(std::size_t s, std::size_t t) const { return p_.at(s * n_ + t); }
  Rational& operator()(std::size_t s, std::size_t t) { return p_.at(s * n_ + t); }

  Rational row_sum(std::size_t s) const;
  /// Regions t reachable from s, i.e. p_st > 0, ascending.
  std::vector<std::size_t> successors(std::size_t s) const;

  friend bool operator==(const ConnectionMatrix&, const ConnectionMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Rational> p_;
};

/// p_st = 1/a_s when I_s lies in the domain of map t, with a_s the number
/// of such t. Throws UnreachableRegion for an all-zero row.
ConnectionMatrix build_connection_matrix(const Partition& partition);

/// Data chords behind the shift functions of one region, plus the derived
/// bounds used by the smoothness constants.
struct ShiftPair {
  Chord g;         // y chord across the domain
  Chord g_hidden;  // z chord across the domain
  Chord h;         // y chord across the region
  Chord h_hidden;  // z chord across the region
  double lipschitz_q = 0.0;
  double lipschitz_q_tilde = 0.0;
  /// Upper bounds of |q| and |q~| over the domain.
  double sup_q = 0.0;
  double sup_q_tilde = 0.0;
};

struct RegionMap {
  std::size_t domain = 0;
  Interval domain_interval;
  Interval region_interval;
  PiecewiseAffineMap L;
  RegionFactors factors;
  ShiftPair shift;

  double q(double x) const noexcept;
  double q_tilde(double x) const noexcept;
  /// (F1, F2) at x in the domain; no range check.
  std::array<double, 2> F(double x, double y, double z) const noexcept;
};

ShiftPair build_shift_pair(const ExtendedDataset& ds, const Partition& partition, const RegionFactors& factors,
                           const PiecewiseAffineMap& L, std::size_t i);

struct ModelMetadata {
  double s_bar = 0.0;
  /// L_L = max_i |I_i| / |domain of i|
  double ratio_max = 0.0;
  /// l_L = min_i |I_i| / |domain of i|
  double ratio_min = 0.0;
  double domain_min = 0.0;
  double domain_max = 0.0;
  double region_min = 0.0;
};

/// A validated system. Everything is stored on the unit interval; the
/// user-coordinate data and factors are kept for output and persistence.
class RifsModel {
 public:
  std::size_t region_count() const noexcept { return regions_.size(); }
  const ExtendedDataset& data() const noexcept { return unit_data_; }
  const ExtendedDataset& source_data() const noexcept { return source_data_; }
  AbscissaScale scale() const noexcept { return scale_; }
  const Partition& partition() const noexcept { return partition_; }
  const FactorSet& factors() const noexcept { return unit_factors_; }
  const FactorSet& source_factors() const noexcept { return source_factors_; }
  std::span<const RegionMap> regions() const noexcept { return regions_; }
  const RegionMap& region(std::size_t i) const { return regions_.at(i); }
  const ConnectionMatrix& connection() const noexcept { return connection_; }
  const ModelMetadata& metadata() const noexcept { return metadata_; }

 private:
  friend RifsModel assemble_with_maps(const ExtendedDataset&, const ExtendedDataset&, const Partition&,
                                      const FactorSet&, const FactorSet&, std::vector<PiecewiseAffineMap>);
  RifsModel(ExtendedDataset unit, ExtendedDataset source, Partition partition, FactorSet unit_factors,
            FactorSet source_factors)
      : unit_data_(std::move(unit)),
        source_data_(std::move(source)),
        partition_(std::move(partition)),
        unit_factors_(std::move(unit_factors)),
        source_factors_(std::move(source_factors)) {}

  ExtendedDataset unit_data_;
  ExtendedDataset source_data_;
  AbscissaScale scale_;
  Partition partition_;
  FactorSet unit_factors_;
  FactorSet source_factors_;
  std::vector<RegionMap> regions_;
  ConnectionMatrix connection_;
  ModelMetadata metadata_;
};

/// Vertical map of region i at x in its domain (1e-12 slack at the ends).
std::array<double, 2> eval_F(const RifsModel& model, std::size_t i, double x, double y, double z);

/// Validates everything and builds the affine maps. `factors` live on the
/// regions of `ds` in user coordinates.
RifsModel assemble(const ExtendedDataset& ds, const PartitionSpec& spec, const FactorSet& factors);

/// Lower-level builder for systems whose maps are given (e.g. conjugated
/// ones). `unit` and `unit_factors` are on [0, 1]; `maps[i]` takes the domain
/// of region i onto region i. Checks S̄ < 1, the connection matrix and the
/// endpoint conditions.
RifsModel assemble_with_maps(const ExtendedDataset& unit, const ExtendedDataset& source, const Partition& partition,
                             const FactorSet& unit_factors, const FactorSet& source_factors,
                             std::vector<PiecewiseAffineMap> maps);

}  // namespace hvrfif
