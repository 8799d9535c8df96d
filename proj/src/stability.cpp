#include "hvrfif/stability.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include <fmt/format.h>

#include "hvrfif/error.hpp"

namespace hvrfif {

namespace {

constexpr std::size_t kMaxRedraws = 10000;

bool strictly_increasing(std::span<const double> xs) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) return false;
  return true;
}

std::vector<double> abscissas(const ExtendedDataset& ds) {
  std::vector<double> xs;
  xs.reserve(ds.nodes().size());
  for (const auto& n : ds.nodes()) xs.push_back(n.x);
  return xs;
}

void require_contractive(const StabilityConstants& c) {
  if (!(c.omega + c.omega_tilde < 1.0))
    throw Error(ErrorCode::HypothesisViolated,
                fmt::format("omega + omega~ = {} is not below 1", c.omega + c.omega_tilde));
}

void require_smoothness(const StabilityContext& ctx, const StabilityConstants& c) {
  if (!ctx.smoothness) throw Error(ErrorCode::HypothesisViolated, ctx.smoothness_error);
  const auto& meta = ctx.model->metadata();
  const double threshold = meta.ratio_min / meta.ratio_max;
  if (!(c.omega + c.omega_tilde < threshold))
    throw Error(ErrorCode::HypothesisViolated,
                fmt::format("omega + omega~ = {} is not below l_L/L_L = {}", c.omega + c.omega_tilde, threshold));
}

// Numerator coefficient of the abscissa term.
double abscissa_coefficient(const StabilityConstants& c) {
  return c.L1 * (1.0 + c.omega - c.omega_tilde) + 2.0 * c.omega * c.L2 + c.omega * c.N;
}

double ordinate_numerator(const StabilityConstants& c) { return 1.0 + 2.0 * c.omega - c.omega_tilde; }

double denominator(const StabilityConstants& c) { return 1.0 - c.omega - c.omega_tilde; }

StabilityConstants base_constants(const StabilityContext& ctx) {
  const auto& fs = ctx.model->factors();
  StabilityConstants c;
  c.omega = fs.omega();
  c.omega_tilde = fs.omega_tilde();
  if (ctx.smoothness) {
    c.L1 = ctx.smoothness->L1;
    c.L2 = ctx.smoothness->L2;
    c.tau = std::min(ctx.smoothness->tau1, ctx.smoothness->tau2);
  }
  return c;
}

void add_data_constants(StabilityConstants& c, const RifsModel& a, const RifsModel& b) {
  c.y_max = std::max(a.data().max_abs_y(), b.data().max_abs_y());
  c.z_max = std::max(a.data().max_abs_z(), b.data().max_abs_z());
  c.domain_min = std::min(a.metadata().domain_min, b.metadata().domain_min);
  c.N = 12.0 * c.omega * (c.y_max + c.z_max) / (c.domain_min * c.domain_min);
}

void require_kind(int bound_id, const Perturbation& p) {
  const bool ok = [&] {
    switch (bound_id) {
      case 4: return p.max_dy == 0.0 && p.max_dz == 0.0;
      case 5: return p.max_dx == 0.0 && p.max_dz == 0.0;
      case 6: return p.max_dx == 0.0 && p.max_dy == 0.0;
      default: return true;
    }
  }();
  if (!ok)
    throw Error(ErrorCode::PerturbationMismatch,
                fmt::format("a {} perturbation moves coordinates outside the scope of bound {}", to_string(p.kind),
                            bound_id));
}

}  // namespace

std::string_view to_string(PerturbationKind k) noexcept {
  switch (k) {
    case PerturbationKind::abscissa: return "abscissa";
    case PerturbationKind::ordinate: return "ordinate";
    case PerturbationKind::hidden: return "hidden";
    case PerturbationKind::combined: return "combined";
  }
  return "combined";
}

Perturbation make_perturbation(const RifsModel& model, PerturbationKind kind, std::vector<Node> deltas) {
  const auto nodes = model.data().nodes();
  if (deltas.size() != nodes.size())
    throw Error(ErrorCode::PerturbationMismatch,
                fmt::format("{} displacements for {} nodes", deltas.size(), nodes.size()));

  Perturbation p;
  p.kind = kind;
  for (const auto& d : deltas) {
    if (!std::isfinite(d.x) || !std::isfinite(d.y) || !std::isfinite(d.z))
      throw Error(ErrorCode::NonFiniteValue, "non-finite displacement");
    p.max_dx = std::max(p.max_dx, std::abs(d.x));
    p.max_dy = std::max(p.max_dy, std::abs(d.y));
    p.max_dz = std::max(p.max_dz, std::abs(d.z));
  }
  const bool moves_x = p.max_dx > 0.0, moves_y = p.max_dy > 0.0, moves_z = p.max_dz > 0.0;
  const bool allowed = kind == PerturbationKind::combined ||
                       (kind == PerturbationKind::abscissa && !moves_y && !moves_z) ||
                       (kind == PerturbationKind::ordinate && !moves_x && !moves_z) ||
                       (kind == PerturbationKind::hidden && !moves_x && !moves_y);
  if (!allowed)
    throw Error(ErrorCode::PerturbationMismatch,
                fmt::format("{} perturbation moves other coordinates", to_string(kind)));

  if (deltas.front().x != 0.0 || deltas.back().x != 0.0)
    throw Error(ErrorCode::EndpointMoved, "the end abscissas must stay fixed");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i].x + deltas[i].x > nodes[i - 1].x + deltas[i - 1].x))
      throw Error(ErrorCode::OrderViolated, fmt::format("perturbed abscissas {} and {} out of order", i - 1, i));

  p.deltas = std::move(deltas);
  return p;
}

Perturbation draw_perturbation(const RifsModel& model, PerturbationKind kind, double max_dx, double max_dy,
                               double max_dz, std::mt19937_64& rng) {
  const bool use_x = kind == PerturbationKind::abscissa || kind == PerturbationKind::combined;
  const bool use_y = kind == PerturbationKind::ordinate || kind == PerturbationKind::combined;
  const bool use_z = kind == PerturbationKind::hidden || kind == PerturbationKind::combined;
  for (double m : {max_dx, max_dy, max_dz})
    if (!(m >= 0.0) || !std::isfinite(m))
      throw Error(ErrorCode::DomainError, fmt::format("perturbation magnitude {} is not a finite nonnegative", m));

  const auto nodes = model.data().nodes();
  const std::size_t count = nodes.size();
  const auto draw = [&rng](double m) { return m > 0.0 ? std::uniform_real_distribution<double>(-m, m)(rng) : 0.0; };

  std::vector<Node> deltas(count);
  if (use_x) {
    std::size_t attempt = 0;
    for (;; ++attempt) {
      if (attempt == kMaxRedraws)
        throw Error(ErrorCode::OrderViolated,
                    fmt::format("no order-preserving abscissa draw of magnitude {} in {} attempts", max_dx, kMaxRedraws));
      for (std::size_t i = 1; i + 1 < count; ++i) deltas[i].x = draw(max_dx);
      bool ordered = true;
      for (std::size_t i = 1; i < count && ordered; ++i)
        ordered = nodes[i].x + deltas[i].x > nodes[i - 1].x + deltas[i - 1].x;
      if (ordered) break;
    }
  }
  for (auto& d : deltas) {
    if (use_y) d.y = draw(max_dy);
    if (use_z) d.z = draw(max_dz);
  }
  return make_perturbation(model, kind, std::move(deltas));
}

ExtendedDataset perturbed_data(const RifsModel& model, const Perturbation& p) {
  const auto nodes = model.data().nodes();
  if (p.deltas.size() != nodes.size())
    throw Error(ErrorCode::PerturbationMismatch,
                fmt::format("{} displacements for {} nodes", p.deltas.size(), nodes.size()));
  std::vector<Node> out(nodes.begin(), nodes.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].x += p.deltas[i].x;
    out[i].y += p.deltas[i].y;
    out[i].z += p.deltas[i].z;
  }
  out.front().x = 0.0;
  out.back().x = 1.0;
  return validate_dataset(std::move(out));
}

PiecewiseAffineMap rescale_map(std::span<const double> original, std::span<const double> perturbed) {
  if (original.size() != perturbed.size() || original.size() < 2)
    throw Error(ErrorCode::PerturbationMismatch,
                fmt::format("node sets of sizes {} and {}", original.size(), perturbed.size()));
  if (original.front() != perturbed.front() || original.back() != perturbed.back())
    throw Error(ErrorCode::EndpointMoved, "the end abscissas must coincide");
  if (!strictly_increasing(original) || !strictly_increasing(perturbed))
    throw Error(ErrorCode::OrderViolated, "abscissas must be strictly increasing");
  if (std::equal(original.begin(), original.end(), perturbed.begin()))
    return PiecewiseAffineMap::identity({original.front(), original.back()});
  return PiecewiseAffineMap({original.begin(), original.end()}, {perturbed.begin(), perturbed.end()});
}

RifsModel conjugate_model(const RifsModel& model, const PiecewiseAffineMap& R, const ExtendedDataset& perturbed_unit) {
  const std::size_t n = model.region_count();
  if (perturbed_unit.regions() != n)
    throw Error(ErrorCode::PerturbationMismatch, "perturbed data has a different number of regions");
  const auto& partition = model.partition();
  const auto scale = model.scale();

  std::vector<Node> raw(perturbed_unit.nodes().begin(), perturbed_unit.nodes().end());
  for (auto& node : raw) node.x = scale.from_unit(node.x);
  raw.front().x = model.source_data().span().lo;
  raw.back().x = model.source_data().span().hi;
  const auto source = validate_dataset(std::move(raw));

  std::vector<PiecewiseAffineMap> maps;
  maps.reserve(n);
  if (R.is_identity()) {
    for (const auto& r : model.regions()) maps.push_back(r.L);
    return assemble_with_maps(perturbed_unit, source, partition, model.factors(), model.source_factors(),
                              std::move(maps));
  }

  const auto R_inv = R.inverse_map();
  std::vector<RegionFactors> unit_rows, source_rows;
  unit_rows.reserve(n);
  source_rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = model.region(i);
    const auto& d = partition.domain(r.domain);
    const Interval domain_star{perturbed_unit.node(d.start).x, perturbed_unit.node(d.end).x};
    maps.push_back(compose(R.restricted(r.region_interval), compose(r.L, R_inv.restricted(domain_star))));

    // R^-1 is a single affine piece on each perturbed region.
    const Interval on = perturbed_unit.region(i);
    const double slope = r.region_interval.length() / on.length();
    const double offset = r.region_interval.lo - slope * on.lo;
    const auto pull = [&](const FactorFunction& f) { return f.pulled_back(slope, offset, on); };
    const auto& row = r.factors;
    unit_rows.push_back({pull(row.s), pull(row.sp), pull(row.st), pull(row.stp)});

    const Interval src_on = source.region(i);
    const auto to_source = [&](const FactorFunction& f) {
      return f.pulled_back(1.0 / scale.span, -scale.origin / scale.span, src_on);
    };
    const auto& u = unit_rows.back();
    source_rows.push_back({to_source(u.s), to_source(u.sp), to_source(u.st), to_source(u.stp)});
  }
  return assemble_with_maps(perturbed_unit, source, partition, FactorSet(std::move(unit_rows)),
                            FactorSet(std::move(source_rows)), std::move(maps));
}

RifsModel perturb_model(const RifsModel& model, const Perturbation& p) {
  const auto star = perturbed_data(model, p);
  const auto R = rescale_map(abscissas(model.data()), abscissas(star));
  return conjugate_model(model, R, star);
}

double abscissa_bound(const StabilityConstants& c, double max_dx) {
  return abscissa_coefficient(c) * std::pow(max_dx, c.tau) / denominator(c);
}

double ordinate_bound(const StabilityConstants& c, double max_dy) {
  return ordinate_numerator(c) * max_dy / denominator(c);
}

double hidden_bound(const StabilityConstants& c, double max_dz) { return c.omega * max_dz / denominator(c); }

double combined_bound(const StabilityConstants& c, double max_dx, double max_dy, double max_dz) {
  // Grouped so that with max_dx = max_dz = 0 the value equals ordinate_bound bit for bit.
  const double x_term = abscissa_coefficient(c) * std::pow(max_dx, c.tau);
  return (x_term + ordinate_numerator(c) * max_dy + c.omega * max_dz) / denominator(c);
}

double ordinate_coefficient(double omega, double omega_tilde) {
  return (1.0 + 2.0 * omega - omega_tilde) / (1.0 - omega - omega_tilde);
}

double hidden_coefficient(double omega, double omega_tilde) { return omega / (1.0 - omega - omega_tilde); }

StabilityContext make_stability_context(const RifsModel& model, const SolverOptions& solver, double alpha,
                                        bool measured) {
  StabilityContext ctx;
  ctx.model = &model;
  ctx.solver = solver;
  ctx.base = solve_fixed_point(model, solver);
  FunctionBounds bounds;
  if (measured) {
    bounds = measured_bounds(ctx.base);
  } else {
    const auto b = sup_norm_bound(model);
    bounds = {b.f1, b.f2};
  }
  try {
    ctx.smoothness = compute_constants(model, bounds, alpha);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::HypothesisViolated && e.code() != ErrorCode::NonPositiveExponent) throw;
    ctx.smoothness_error = e.what();
  }
  return ctx;
}

double empirical_sup_difference(const EvaluationGrid& a, const EvaluationGrid& b) {
  std::vector<double> xs;
  xs.reserve(a.xs.size() + b.xs.size());
  std::merge(a.xs.begin(), a.xs.end(), b.xs.begin(), b.xs.end(), std::back_inserter(xs));
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double sup = 0.0;
  for (double x : xs) sup = std::max(sup, std::abs(a.value1(x) - b.value1(x)));
  return sup;
}

StabilityReport check_bound(const StabilityContext& ctx, int bound_id, const Perturbation& p) {
  if (bound_id < 4 || bound_id > 7)
    throw Error(ErrorCode::DomainError, fmt::format("no stability bound {}; choose 4, 5, 6 or 7", bound_id));
  require_kind(bound_id, p);

  StabilityReport rep;
  rep.bound_id = bound_id;
  rep.max_dx = p.max_dx;
  rep.max_dy = p.max_dy;
  rep.max_dz = p.max_dz;
  rep.constants = base_constants(ctx);
  require_contractive(rep.constants);
  if (bound_id == 4 || bound_id == 7) require_smoothness(ctx, rep.constants);

  const auto perturbed = perturb_model(*ctx.model, p);
  add_data_constants(rep.constants, *ctx.model, perturbed);
  const auto& c = rep.constants;
  switch (bound_id) {
    case 4: rep.theoretical_bound = abscissa_bound(c, p.max_dx); break;
    case 5: rep.theoretical_bound = ordinate_bound(c, p.max_dy); break;
    case 6: rep.theoretical_bound = hidden_bound(c, p.max_dz); break;
    default: rep.theoretical_bound = combined_bound(c, p.max_dx, p.max_dy, p.max_dz); break;
  }
  if (bound_id == 4 || bound_id == 7)
    rep.notes.push_back(
        "N = 12 omega (|y|max + |z|max) / |I~|min^2; the squared denominator is kept although the estimate it "
        "comes from only needs the first power, so N may be larger than necessary");

  const auto grid = solve_fixed_point(perturbed, ctx.solver);
  rep.empirical_sup = empirical_sup_difference(ctx.base, grid);
  rep.budget = 2.0 * ctx.solver.tolerance;
  rep.margin = rep.theoretical_bound - rep.empirical_sup;
  rep.passed = rep.empirical_sup <= rep.theoretical_bound + rep.budget;
  return rep;
}

StabilityReport bound_abscissa(const StabilityContext& ctx, const Perturbation& p) { return check_bound(ctx, 4, p); }
StabilityReport bound_ordinate(const StabilityContext& ctx, const Perturbation& p) { return check_bound(ctx, 5, p); }
StabilityReport bound_hidden(const StabilityContext& ctx, const Perturbation& p) { return check_bound(ctx, 6, p); }
StabilityReport bound_combined(const StabilityContext& ctx, const Perturbation& p) { return check_bound(ctx, 7, p); }

PerturbationKind kind_for_bound(int bound_id) {
  switch (bound_id) {
    case 4: return PerturbationKind::abscissa;
    case 5: return PerturbationKind::ordinate;
    case 6: return PerturbationKind::hidden;
    case 7: return PerturbationKind::combined;
  }
  throw Error(ErrorCode::DomainError, fmt::format("no stability bound {}; choose 4, 5, 6 or 7", bound_id));
}

std::vector<StabilityReport> run_stability_trials(const StabilityContext& ctx, int bound_id, Magnitudes magnitudes,
                                                  std::size_t trials, std::uint64_t seed) {
  const auto kind = kind_for_bound(bound_id);
  const auto one = [&](std::size_t t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
    std::mt19937_64 rng(seq);
    const auto p = draw_perturbation(*ctx.model, kind, magnitudes.dx, magnitudes.dy, magnitudes.dz, rng);
    return check_bound(ctx, bound_id, p);
  };

  std::vector<StabilityReport> out(trials);
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(trials, 1));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t t = w; t < trials; t += workers) out[t] = one(t);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

}  // namespace hvrfif
