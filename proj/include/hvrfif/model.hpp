#pragma once

// Interpolation data, region/domain partition and contractivity factor
// functions, together with the validity checks the construction relies on.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace hvrfif {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  bool contains(double x, double tol = 0.0) const noexcept { return x >= lo - tol && x <= hi + tol; }
};

/// One interpolation node: abscissa, ordinate and hidden ordinate.
struct Node {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Affine change of abscissa between the user interval and [0, 1].
struct AbscissaScale {
  double origin = 0.0;
  double span = 1.0;

  double to_unit(double x) const noexcept { return (x - origin) / span; }
  double from_unit(double t) const noexcept { return origin + span * t; }
};

class ExtendedDataset {
 public:
  std::span<const Node> nodes() const noexcept { return nodes_; }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  /// Number of regions n (nodes - 1).
  std::size_t regions() const noexcept { return nodes_.size() - 1; }
  /// Region I_{i+1} = [x_i, x_{i+1}] for zero-based i.
  Interval region(std::size_t i) const { return {nodes_.at(i).x, nodes_.at(i + 1).x}; }
  Interval span() const noexcept { return {nodes_.front().x, nodes_.back().x}; }

  AbscissaScale unit_scale() const noexcept;
  /// The same data with abscissas mapped affinely onto [0, 1].
  ExtendedDataset to_unit() const;

  double max_abs_y() const noexcept;
  double max_abs_z() const noexcept;

 private:
  friend ExtendedDataset validate_dataset(std::vector<Node> raw);
  std::vector<Node> nodes_;
};

/// Checks order, count and finiteness. Never re-sorts.
ExtendedDataset validate_dataset(std::vector<Node> raw);

enum class Orientation { increasing, decreasing };

std::string_view to_string(Orientation o) noexcept;

/// Node-index endpoints (s(k), e(k)) of a domain.
struct DomainSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

struct PartitionSpec {
  std::vector<DomainSpan> domains;
  /// Zero-based domain index per zero-based region.
  std::vector<std::size_t> gamma;
  /// Per region; empty means every map is increasing.
  std::vector<Orientation> orientation;
  /// Accept a single domain (plain IFS degeneration).
  bool allow_single_domain = false;
};

class Partition {
 public:
  std::size_t region_count() const noexcept { return spec_.gamma.size(); }
  std::size_t domain_count() const noexcept { return spec_.domains.size(); }
  const DomainSpan& domain(std::size_t k) const { return spec_.domains.at(k); }
  std::size_t gamma(std::size_t i) const { return spec_.gamma.at(i); }
  Orientation orientation(std::size_t i) const { return spec_.orientation.at(i); }
  const PartitionSpec& spec() const noexcept { return spec_; }

  /// I_{region} is a subset of domain k (index test, exact).
  bool region_in_domain(std::size_t region, std::size_t k) const {
    const auto& d = domain(k);
    return d.start <= region && region + 1 <= d.end;
  }

  double region_length(std::size_t i) const { return region_lengths_.at(i); }
  double domain_length(std::size_t k) const { return domain_lengths_.at(k); }

 private:
  friend Partition validate_partition(const ExtendedDataset& ds, PartitionSpec spec);
  PartitionSpec spec_;
  std::vector<double> region_lengths_;
  std::vector<double> domain_lengths_;
};

Partition validate_partition(const ExtendedDataset& ds, PartitionSpec spec);

enum class FactorFamily { constant, affine, sinusoid, table };

std::string_view to_string(FactorFamily f) noexcept;
FactorFamily factor_family_from_string(std::string_view name);

/// Family and coefficients of a factor, independent of its interval.
///   constant: [c]
///   affine:   [intercept, slope]        value = intercept + slope * (x - lo)
///   sinusoid: [amplitude, freq, phase]  value = amplitude * sin(freq * x + phase)
///   table:    equally spaced samples over the interval, linearly joined;
///             `lipschitz` is taken on trust.
struct FactorSpec {
  FactorFamily family = FactorFamily::constant;
  std::vector<double> params;
  double lipschitz = 0.0;
};

class FactorFunction {
 public:
  FactorFunction(FactorSpec spec, Interval on);

  static FactorFunction constant(double c, Interval on) {
    return FactorFunction({FactorFamily::constant, {c}, 0.0}, on);
  }

  double operator()(double x) const noexcept;

  /// Exact sup of |f| over the interval.
  double sup_abs() const noexcept { return sup_abs_; }
  /// Upper bound on the Lipschitz constant over the interval.
  double lipschitz() const noexcept { return lipschitz_; }
  /// False for user tables, whose Lipschitz constant is not checked.
  bool verified() const noexcept { return spec_.family != FactorFamily::table; }

  FactorFamily family() const noexcept { return spec_.family; }
  const FactorSpec& spec() const noexcept { return spec_; }
  Interval domain() const noexcept { return domain_; }

  /// t -> f(slope * t + offset) on `new_domain`, which must map onto domain().
  FactorFunction pulled_back(double slope, double offset, Interval new_domain) const;

 private:
  FactorSpec spec_;
  Interval domain_;
  double sup_abs_ = 0.0;
  double lipschitz_ = 0.0;
};

inline double sup_abs(const FactorFunction& f) noexcept { return f.sup_abs(); }

/// s_i, s'_i, s~_i, s~'_i on one region.
struct RegionFactors {
  FactorFunction s;
  FactorFunction sp;
  FactorFunction st;
  FactorFunction stp;
};

struct RegionFactorSpecs {
  FactorSpec s;
  FactorSpec sp;
  FactorSpec st;
  FactorSpec stp;
};

class FactorSet {
 public:
  explicit FactorSet(std::vector<RegionFactors> rows);

  std::size_t size() const noexcept { return rows_.size(); }
  const RegionFactors& row(std::size_t i) const { return rows_.at(i); }
  std::span<const RegionFactors> rows() const noexcept { return rows_; }

  /// max over regions of (s̄ + s̃̄, s̄' + s̃̄').
  double s_bar() const noexcept;
  /// omega_i = max(s̄_i, s̄'_i)
  double omega(std::size_t i) const;
  /// omega~_i = max(s̃̄_i, s̃̄'_i)
  double omega_tilde(std::size_t i) const;
  double omega() const noexcept;
  double omega_tilde() const noexcept;

  bool all_verified() const noexcept;

 private:
  std::vector<RegionFactors> rows_;
};

FactorSet make_factor_set(const ExtendedDataset& ds, std::span<const RegionFactorSpecs> specs);
FactorSet constant_factors(const ExtendedDataset& ds, double s, double sp, double st, double stp);

struct ContractionCheck {
  double s_bar = 0.0;
  bool contraction_ok = false;
};

ContractionCheck s_bar_matrix_norm(const FactorSet& fs) noexcept;

}  // namespace hvrfif
