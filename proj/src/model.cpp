#include "hvrfif/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hvrfif/error.hpp"

namespace hvrfif {

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

// Largest |sin| (or |cos| when `cosine`) over the phase window [a, b].
double max_abs_trig(double a, double b, bool cosine) {
  if (a > b) std::swap(a, b);
  const double pi = std::numbers::pi;
  // Peaks of |sin| sit at pi/2 + k pi, peaks of |cos| at k pi.
  const double first_peak = cosine ? 0.0 : pi / 2;
  const double k = std::ceil((a - first_peak) / pi);
  if (first_peak + k * pi <= b) return 1.0;
  if (cosine) return std::max(std::abs(std::cos(a)), std::abs(std::cos(b)));
  return std::max(std::abs(std::sin(a)), std::abs(std::sin(b)));
}

std::size_t expected_params(FactorFamily f) {
  switch (f) {
    case FactorFamily::constant: return 1;
    case FactorFamily::affine: return 2;
    case FactorFamily::sinusoid: return 3;
    case FactorFamily::table: return 0;
  }
  return 0;
}

}  // namespace

AbscissaScale ExtendedDataset::unit_scale() const noexcept {
  return {nodes_.front().x, nodes_.back().x - nodes_.front().x};
}

ExtendedDataset ExtendedDataset::to_unit() const {
  const auto scale = unit_scale();
  std::vector<Node> unit(nodes_);
  for (auto& n : unit) n.x = scale.to_unit(n.x);
  unit.front().x = 0.0;
  unit.back().x = 1.0;
  return validate_dataset(std::move(unit));
}

double ExtendedDataset::max_abs_y() const noexcept {
  double m = 0.0;
  for (const auto& n : nodes_) m = std::max(m, std::abs(n.y));
  return m;
}

double ExtendedDataset::max_abs_z() const noexcept {
  double m = 0.0;
  for (const auto& n : nodes_) m = std::max(m, std::abs(n.z));
  return m;
}

ExtendedDataset validate_dataset(std::vector<Node> raw) {
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& n = raw[i];
    if (!std::isfinite(n.x) || !std::isfinite(n.y) || !std::isfinite(n.z))
      throw Error(ErrorCode::NonFiniteValue, "node " + std::to_string(i) + " has a non-finite coordinate");
  }
  for (std::size_t i = 1; i < raw.size(); ++i) {
    if (!(raw[i - 1].x < raw[i].x))
      throw Error(ErrorCode::NonIncreasingAbscissas,
                  "x[" + std::to_string(i - 1) + "] >= x[" + std::to_string(i) + "]");
  }
  if (raw.size() < 4)
    throw Error(ErrorCode::TooFewNodes,
                "need at least 4 nodes (3 regions), got " + std::to_string(raw.size()));
  ExtendedDataset ds;
  ds.nodes_ = std::move(raw);
  return ds;
}

std::string_view to_string(Orientation o) noexcept {
  return o == Orientation::increasing ? "increasing" : "decreasing";
}

Partition validate_partition(const ExtendedDataset& ds, PartitionSpec spec) {
  const std::size_t n = ds.regions();
  const std::size_t l = spec.domains.size();

  if (spec.gamma.size() != n)
    throw Error(ErrorCode::IndexOutOfRange,
                "gamma has " + std::to_string(spec.gamma.size()) + " entries for " + std::to_string(n) + " regions");
  if (spec.orientation.empty()) spec.orientation.assign(n, Orientation::increasing);
  if (spec.orientation.size() != n)
    throw Error(ErrorCode::IndexOutOfRange,
                "orientation has " + std::to_string(spec.orientation.size()) + " entries for " +
                    std::to_string(n) + " regions");

  const std::size_t min_domains = spec.allow_single_domain ? 1 : 2;
  if (l < min_domains || l > n)
    throw Error(ErrorCode::DomainCountOutOfRange,
                "domain count " + std::to_string(l) + " outside [" + std::to_string(min_domains) + ", " +
                    std::to_string(n) + "]");

  Partition p;
  p.domain_lengths_.reserve(l);
  for (std::size_t k = 0; k < l; ++k) {
    const auto& d = spec.domains[k];
    if (d.end > n || d.start >= d.end)
      throw Error(ErrorCode::IndexOutOfRange, "domain " + std::to_string(k + 1) + " endpoints out of range");
    if (d.end - d.start < 2)
      throw Error(ErrorCode::DomainTooSmall,
                  "domain " + std::to_string(k + 1) + " spans " + std::to_string(d.end - d.start) + " region(s)");
    p.domain_lengths_.push_back(ds.node(d.end).x - ds.node(d.start).x);
  }

  p.region_lengths_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.gamma[i] >= l)
      throw Error(ErrorCode::IndexOutOfRange, "gamma of region " + std::to_string(i + 1) + " names no domain");
    const double region_len = ds.region(i).length();
    if (!(region_len < p.domain_lengths_[spec.gamma[i]]))
      throw Error(ErrorCode::RegionNotSmallerThanDomain,
                  "region " + std::to_string(i + 1) + " is not shorter than domain " +
                      std::to_string(spec.gamma[i] + 1));
    p.region_lengths_.push_back(region_len);
  }
  p.spec_ = std::move(spec);
  return p;
}

std::string_view to_string(FactorFamily f) noexcept {
  switch (f) {
    case FactorFamily::constant: return "constant";
    case FactorFamily::affine: return "affine";
    case FactorFamily::sinusoid: return "sinusoid";
    case FactorFamily::table: return "table";
  }
  return "constant";
}

FactorFamily factor_family_from_string(std::string_view name) {
  if (name == "constant") return FactorFamily::constant;
  if (name == "affine") return FactorFamily::affine;
  if (name == "sinusoid" || name == "scaled-sinusoid") return FactorFamily::sinusoid;
  if (name == "table") return FactorFamily::table;
  throw Error(ErrorCode::InvalidFactor, "unknown factor family '" + std::string(name) + "'");
}

FactorFunction::FactorFunction(FactorSpec spec, Interval on) : spec_(std::move(spec)), domain_(on) {
  if (!(std::isfinite(on.lo) && std::isfinite(on.hi) && on.lo < on.hi))
    throw Error(ErrorCode::InvalidFactor, "factor interval must be finite and non-empty");
  if (!all_finite(spec_.params) || !std::isfinite(spec_.lipschitz))
    throw Error(ErrorCode::InvalidFactor, "factor parameters must be finite");

  const auto& p = spec_.params;
  if (spec_.family == FactorFamily::table) {
    if (p.size() < 2) throw Error(ErrorCode::InvalidFactor, "table factor needs at least 2 samples");
    if (spec_.lipschitz < 0.0) throw Error(ErrorCode::InvalidFactor, "table Lipschitz constant must be >= 0");
  } else if (p.size() != expected_params(spec_.family)) {
    throw Error(ErrorCode::InvalidFactor, std::string(to_string(spec_.family)) + " factor expects " +
                                              std::to_string(expected_params(spec_.family)) + " parameter(s)");
  }

  switch (spec_.family) {
    case FactorFamily::constant:
      sup_abs_ = std::abs(p[0]);
      lipschitz_ = 0.0;
      break;
    case FactorFamily::affine:
      sup_abs_ = std::max(std::abs(p[0]), std::abs(p[0] + p[1] * on.length()));
      lipschitz_ = std::abs(p[1]);
      break;
    case FactorFamily::sinusoid: {
      const double a = p[1] * on.lo + p[2];
      const double b = p[1] * on.hi + p[2];
      sup_abs_ = std::abs(p[0]) * max_abs_trig(a, b, false);
      lipschitz_ = std::abs(p[0] * p[1]) * max_abs_trig(a, b, true);
      break;
    }
    case FactorFamily::table:
      for (double v : p) sup_abs_ = std::max(sup_abs_, std::abs(v));
      lipschitz_ = spec_.lipschitz;
      break;
  }
  if (!(sup_abs_ < 1.0))
    throw Error(ErrorCode::FactorNotContractive,
                std::string(to_string(spec_.family)) + " factor reaches |value| = " + std::to_string(sup_abs_) +
                    " >= 1 on [" + std::to_string(on.lo) + ", " + std::to_string(on.hi) + "]");
}

double FactorFunction::operator()(double x) const noexcept {
  const auto& p = spec_.params;
  switch (spec_.family) {
    case FactorFamily::constant: return p[0];
    case FactorFamily::affine: return p[0] + p[1] * (x - domain_.lo);
    case FactorFamily::sinusoid: return p[0] * std::sin(p[1] * x + p[2]);
    case FactorFamily::table: {
      const double t = std::clamp((x - domain_.lo) / domain_.length(), 0.0, 1.0);
      const double pos = t * static_cast<double>(p.size() - 1);
      const auto j = std::min(static_cast<std::size_t>(pos), p.size() - 2);
      const double w = pos - static_cast<double>(j);
      return (1.0 - w) * p[j] + w * p[j + 1];
    }
  }
  return 0.0;
}

FactorFunction FactorFunction::pulled_back(double slope, double offset, Interval new_domain) const {
  FactorSpec out = spec_;
  auto& p = out.params;
  switch (spec_.family) {
    case FactorFamily::constant: break;
    case FactorFamily::affine:
      p[0] = p[0] + p[1] * (slope * new_domain.lo + offset - domain_.lo);
      p[1] = p[1] * slope;
      break;
    case FactorFamily::sinusoid:
      p[2] = p[1] * offset + p[2];
      p[1] = p[1] * slope;
      break;
    case FactorFamily::table:
      if (slope < 0.0) std::reverse(p.begin(), p.end());
      out.lipschitz = spec_.lipschitz * std::abs(slope);
      break;
  }
  return FactorFunction(std::move(out), new_domain);
}

FactorSet::FactorSet(std::vector<RegionFactors> rows) : rows_(std::move(rows)) {}

double FactorSet::s_bar() const noexcept {
  double m = 0.0;
  for (const auto& r : rows_) {
    m = std::max(m, r.s.sup_abs() + r.st.sup_abs());
    m = std::max(m, r.sp.sup_abs() + r.stp.sup_abs());
  }
  return m;
}

double FactorSet::omega(std::size_t i) const {
  const auto& r = rows_.at(i);
  return std::max(r.s.sup_abs(), r.sp.sup_abs());
}

double FactorSet::omega_tilde(std::size_t i) const {
  const auto& r = rows_.at(i);
  return std::max(r.st.sup_abs(), r.stp.sup_abs());
}

double FactorSet::omega() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < rows_.size(); ++i) m = std::max(m, omega(i));
  return m;
}

double FactorSet::omega_tilde() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < rows_.size(); ++i) m = std::max(m, omega_tilde(i));
  return m;
}

bool FactorSet::all_verified() const noexcept {
  return std::all_of(rows_.begin(), rows_.end(), [](const RegionFactors& r) {
    return r.s.verified() && r.sp.verified() && r.st.verified() && r.stp.verified();
  });
}

FactorSet make_factor_set(const ExtendedDataset& ds, std::span<const RegionFactorSpecs> specs) {
  if (specs.size() != ds.regions())
    throw Error(ErrorCode::IndexOutOfRange, "factor rows: " + std::to_string(specs.size()) + " given, " +
                                                std::to_string(ds.regions()) + " regions");
  std::vector<RegionFactors> rows;
  rows.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto on = ds.region(i);
    rows.push_back({FactorFunction(specs[i].s, on), FactorFunction(specs[i].sp, on), FactorFunction(specs[i].st, on),
                    FactorFunction(specs[i].stp, on)});
  }
  return FactorSet(std::move(rows));
}

FactorSet constant_factors(const ExtendedDataset& ds, double s, double sp, double st, double stp) {
  std::vector<RegionFactorSpecs> specs(ds.regions(), RegionFactorSpecs{{FactorFamily::constant, {s}, 0.0},
                                                                        {FactorFamily::constant, {sp}, 0.0},
                                                                        {FactorFamily::constant, {st}, 0.0},
                                                                        {FactorFamily::constant, {stp}, 0.0}});
  return make_factor_set(ds, specs);
}

ContractionCheck s_bar_matrix_norm(const FactorSet& fs) noexcept {
  const double v = fs.s_bar();
  return {v, v < 1.0};
}

}  // namespace hvrfif
