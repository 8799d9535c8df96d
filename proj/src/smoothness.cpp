#include "hvrfif/smoothness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <numbers>

#include <fmt/format.h>

#include "hvrfif/error.hpp"

namespace hvrfif {

namespace {

constexpr double kCriticalTolerance = 1e-12;

struct HolderPair {
  double L = 0.0;
  double tau = 1.0;
};

HolderPair holder_from_delta(double D, double delta, HolderRegime regime, double ratio_max, double alpha) {
  switch (regime) {
    case HolderRegime::sub:
      return {D / (1.0 - delta), 1.0};
    case HolderRegime::critical:
      return {D * (1.0 + 1.0 / (alpha * std::numbers::e * std::abs(std::log(ratio_max)))), 1.0 - alpha};
    case HolderRegime::super:
      return {D / (delta - 1.0), std::log(delta) / std::log(ratio_max) + 1.0};
  }
  return {};
}

double regression_slope(const std::vector<double>& lx, const std::vector<double>& ly) {
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    sx += lx[j];
    sy += ly[j];
    sxx += lx[j] * lx[j];
    sxy += lx[j] * ly[j];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void fit(const std::vector<double>& scales, const std::vector<double>& osc, double& tau, bool& degenerate) {
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < scales.size(); ++j) {
    if (osc[j] > 0.0) {
      lx.push_back(std::log(scales[j]));
      ly.push_back(std::log(osc[j]));
    }
  }
  if (lx.size() < 2) {
    tau = 1.0;
    degenerate = true;
    return;
  }
  tau = regression_slope(lx, ly);
  degenerate = lx.size() != scales.size();
}

}  // namespace

double log_power_bound(double alpha, double x) {
  if (!(alpha > 0.0) || !(x > 0.0 && x < 1.0))
    throw Error(ErrorCode::DomainError, fmt::format("need alpha > 0 and 0 < x < 1, got alpha={}, x={}", alpha, x));
  return -std::pow(x, alpha) * std::log(x);
}

std::string_view to_string(HolderRegime r) noexcept {
  switch (r) {
    case HolderRegime::sub: return "sub";
    case HolderRegime::critical: return "critical";
    case HolderRegime::super: return "super";
  }
  return "sub";
}

SmoothnessReport compute_constants(const RifsModel& model, FunctionBounds bounds, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorCode::DomainError, fmt::format("alpha must lie in (0, 1), got {}", alpha));
  const auto& meta = model.metadata();
  const auto& fs = model.factors();
  const double threshold = meta.ratio_min / meta.ratio_max;

  SmoothnessReport rep;
  rep.ratio_max = meta.ratio_max;
  rep.ratio_min = meta.ratio_min;
  rep.f1_bound = bounds.f1;
  rep.f2_bound = bounds.f2;
  rep.alpha = alpha;

  for (std::size_t k = 0; k < model.region_count(); ++k) {
    const auto& r = model.region(k);
    const double w = fs.omega(k) + fs.omega_tilde(k);
    if (!(w < threshold))
      throw Error(ErrorCode::HypothesisViolated,
                  fmt::format("region {}: omega + omega~ = {} is not below l_L/L_L = {}", k + 1, w, threshold));
    const double expansion = r.domain_interval.length() / r.region_interval.length();
    rep.delta = std::max(rep.delta, expansion * w);

    const auto& f = r.factors;
    rep.M_k.push_back(bounds.f1 * f.s.lipschitz() + bounds.f2 * f.sp.lipschitz() +
                      r.shift.lipschitz_q * expansion);
    rep.M_tilde_k.push_back(bounds.f1 * f.st.lipschitz() + bounds.f2 * f.stp.lipschitz() +
                            r.shift.lipschitz_q_tilde * expansion);
    rep.M = std::max(rep.M, rep.M_k.back() + rep.M_tilde_k.back());
  }
  rep.D = std::max(rep.M, 2.0 * meta.domain_max * (bounds.f1 + bounds.f2) / (meta.region_min * meta.region_min));

  if (std::abs(rep.delta - 1.0) <= kCriticalTolerance) {
    rep.regime = HolderRegime::critical;
    rep.near_critical = rep.delta != 1.0;
  } else {
    rep.regime = rep.delta < 1.0 ? HolderRegime::sub : HolderRegime::super;
  }

  // D and delta are symmetric in the two components, so the second
  // coordinate's pair comes out of the same formulas.
  const auto pair = holder_from_delta(rep.D, rep.delta, rep.regime, meta.ratio_max, alpha);
  rep.L1 = rep.L2 = pair.L;
  rep.tau1 = rep.tau2 = pair.tau;
  if (!(rep.tau1 > 0.0) || !(rep.tau2 > 0.0))
    throw Error(ErrorCode::NonPositiveExponent, fmt::format("exponent {} from delta = {}", rep.tau1, rep.delta));
  return rep;
}

FunctionBounds measured_bounds(const EvaluationGrid& grid) noexcept {
  FunctionBounds b;
  for (double v : grid.f1) b.f1 = std::max(b.f1, std::abs(v));
  for (double v : grid.f2) b.f2 = std::max(b.f2, std::abs(v));
  return b;
}

std::vector<double> oscillations(std::span<const double> xs, std::span<const double> fs,
                                 std::span<const double> scales) {
  std::vector<double> out;
  out.reserve(scales.size());
  for (double h : scales) {
    const double reach = h * (1.0 + 1e-12);
    std::deque<std::size_t> hi, lo;  // window argmax / argmin candidates
    double best = 0.0;
    std::size_t left = 0;
    for (std::size_t right = 0; right < xs.size(); ++right) {
      while (!hi.empty() && fs[hi.back()] <= fs[right]) hi.pop_back();
      hi.push_back(right);
      while (!lo.empty() && fs[lo.back()] >= fs[right]) lo.pop_back();
      lo.push_back(right);
      while (xs[right] - xs[left] > reach) ++left;
      while (hi.front() < left) hi.pop_front();
      while (lo.front() < left) lo.pop_front();
      best = std::max(best, fs[hi.front()] - fs[lo.front()]);
    }
    out.push_back(best);
  }
  return out;
}

std::vector<double> default_scales(std::size_t resolution) {
  const auto p = static_cast<int>(std::bit_width(resolution - 1)) - 1;
  std::vector<double> scales;
  for (int k = std::max(2, p - 10); k <= p - 2; ++k) scales.push_back(std::ldexp(1.0, -k));
  return scales;
}

HolderEstimate empirical_holder(const EvaluationGrid& grid, std::span<const double> scales) {
  if (scales.size() < 4)
    throw Error(ErrorCode::InsufficientScales, fmt::format("need at least 4 scales, got {}", scales.size()));
  const auto [lo, hi] = std::minmax_element(scales.begin(), scales.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0)
    throw Error(ErrorCode::InsufficientScales, "scales must be positive and span at least two decades");

  HolderEstimate est;
  est.scales.assign(scales.begin(), scales.end());
  est.osc1 = oscillations(grid.xs, grid.f1, scales);
  est.osc2 = oscillations(grid.xs, grid.f2, scales);
  fit(est.scales, est.osc1, est.tau1, est.degenerate1);
  fit(est.scales, est.osc2, est.tau2, est.degenerate2);
  return est;
}

}  // namespace hvrfif
