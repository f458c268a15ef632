#include "fgnls/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "json.hpp"

#include "fgnls/errors.hpp"

namespace fgnls {

namespace {

// Golden-section line search for the minimum of obj on [lo, hi].
double golden_min(const std::function<double(double)>& obj, double lo,
                  double hi, int iters) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = obj(c), fd = obj(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = obj(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = obj(d);
    }
  }
  return 0.5 * (a + b);
}

// Coordinate descent polish of |f| (sign = +1 maximize, -1 minimize).
Eigen::VectorXd polish(const AmplitudeContext& ctx, Eigen::VectorXd x,
                       double radius, int sweeps, double sign) {
  const int g = ctx.surface().genus();
  for (int s = 0; s < sweeps; ++s) {
    for (int i = 0; i < g; ++i) {
      auto obj = [&](double xi) {
        Eigen::VectorXd y = x;
        y(i) = xi;
        return -sign * ctx.f_abs(PhasePoint(y));
      };
      x(i) = golden_min(obj, x(i) - radius, x(i) + radius, 60);
    }
    radius *= 0.5;
  }
  for (int i = 0; i < g; ++i) x(i) -= std::floor(x(i));
  return x;
}

double half_period_prediction(const Surface& s, const Eigen::VectorXd& h) {
  const auto& b = s.band_lengths();
  double num = b[0];
  for (int j = 1; j <= s.genus(); ++j)
    num += (std::abs(h(j - 1) - 0.5) < 1e-12 ? -1.0 : 1.0)
           * b[static_cast<std::size_t>(j)];
  return num / s.band_sum();
}

// Dominant band index, or -1 when no band length exceeds the sum of the rest.
int dominant_band(const Surface& s) {
  const auto& b = s.band_lengths();
  for (std::size_t m = 0; m < b.size(); ++m)
    if (2.0 * b[m] > s.band_sum()) return static_cast<int>(m);
  return -1;
}

}  // namespace

std::optional<double> criticality_check(const AmplitudeContext& ctx,
                                        const PhasePoint& h) {
  if (ctx.f_abs(h) < 1e-9) return std::nullopt;
  const int g = ctx.surface().genus();
  auto grad_norm = [&](double step) {
    double acc = 0.0;
    for (int i = 0; i < g; ++i) {
      Eigen::VectorXd p = h.value(), m = h.value();
      p(i) += step;
      m(i) -= step;
      const double d =
          (ctx.f_abs(PhasePoint(p)) - ctx.f_abs(PhasePoint(m))) / (2.0 * step);
      acc += d * d;
    }
    return std::sqrt(acc);
  };
  const double g1 = grad_norm(1e-5);
  const double g2 = grad_norm(2e-5);
  return std::abs((4.0 * g1 - g2) / 3.0);
}

std::vector<HalfPeriodRow> half_period_table(const AmplitudeContext& ctx) {
  const Surface& s = ctx.surface();
  const int g = s.genus();
  if (g > 12) throw Error("half-period table too large");
  std::vector<HalfPeriodRow> rows;
  for (int m = 0; m < (1 << g); ++m) {
    HalfPeriodRow row;
    row.h = Eigen::VectorXd(g);
    for (int j = 0; j < g; ++j) row.h(j) = 0.5 * ((m >> j) & 1);
    row.measured = ctx.f_value(PhasePoint(row.h));
    row.predicted = half_period_prediction(s, row.h);
    row.discrepancy = std::abs(row.measured - row.predicted);
    row.grad_norm = criticality_check(ctx, PhasePoint(row.h));
    if (!row.grad_norm) row.note = "zero critical value, gradient check skipped";
    rows.push_back(std::move(row));
  }
  return rows;
}

ExtremaReport torus_extrema(const AmplitudeContext& ctx, int grid_per_dim,
                            int refine_steps) {
  if (grid_per_dim < 8) throw Error("grid_per_dim must be at least 8");
  const int g = ctx.surface().genus();
  const int n = grid_per_dim;

  std::size_t total = 1;
  for (int i = 0; i < g; ++i) total *= static_cast<std::size_t>(n);
  std::vector<std::pair<double, std::size_t>> vals(total);
  Eigen::VectorXd x(g);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int i = 0; i < g; ++i) {
      x(i) = static_cast<double>(rem % static_cast<std::size_t>(n)) / n;
      rem /= static_cast<std::size_t>(n);
    }
    vals[flat] = {ctx.f_abs(PhasePoint(x)), flat};
  }

  auto cell_point = [&](std::size_t flat) {
    Eigen::VectorXd p(g);
    for (int i = 0; i < g; ++i) {
      p(i) = static_cast<double>(flat % static_cast<std::size_t>(n)) / n;
      flat /= static_cast<std::size_t>(n);
    }
    return p;
  };

  ExtremaReport rep;
  rep.grid_per_dim = grid_per_dim;
  rep.refine_steps = refine_steps;

  std::vector<std::pair<double, std::size_t>> sorted = vals;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t seeds = std::min<std::size_t>(5, sorted.size());

  rep.max_value = -1.0;
  rep.min_value = 2.0;
  for (std::size_t k = 0; k < seeds; ++k) {
    const Eigen::VectorXd top =
        polish(ctx, cell_point(sorted[sorted.size() - 1 - k].second), 1.0 / n,
               refine_steps, +1.0);
    const double fv = ctx.f_abs(PhasePoint(top));
    if (fv > rep.max_value) {
      rep.max_value = fv;
      rep.argmax = top;
    }
    const Eigen::VectorXd bot =
        polish(ctx, cell_point(sorted[k].second), 1.0 / n, refine_steps, -1.0);
    const double fb = ctx.f_abs(PhasePoint(bot));
    if (fb < rep.min_value) {
      rep.min_value = fb;
      rep.argmin = bot;
    }
  }
  rep.table = half_period_table(ctx);
  return rep;
}

namespace {

DivisorReport divisor_residuals(const AmplitudeContext& ctx, double shift) {
  const Surface& s = ctx.surface();
  const PeriodData& pd = ctx.periods();
  const ThetaContext& th = ctx.theta_ctx();
  DivisorReport rep;
  rep.scale = std::abs(th.theta(Eigen::VectorXcd::Zero(s.genus())));
  Divisor d0 = s.divisor_D0();
  bool first = true;
  for (SheetedPoint p : d0.points) {
    if (first) p.z += shift, first = false;  // only the sensitivity control
    const Eigen::VectorXcd u = abel_map(s, pd.kappa, p);
    rep.residual = std::max(
        rep.residual, std::abs(th.theta(u + pd.u_inf)) / rep.scale);
    // hyperelliptic involution: same projection, other sheet
    SheetedPoint q = p;
    q.sheet = p.sheet == Sheet::Main ? Sheet::Second : Sheet::Main;
    const Eigen::VectorXcd uq = abel_map(s, pd.kappa, q);
    rep.involuted_residual = std::max(
        rep.involuted_residual, std::abs(th.theta(uq - pd.u_inf)) / rep.scale);
  }
  return rep;
}

}  // namespace

DivisorReport divisor_check(const AmplitudeContext& ctx) {
  return divisor_residuals(ctx, 0.0);
}

DivisorReport divisor_check_perturbed(const AmplitudeContext& ctx,
                                      double shift) {
  return divisor_residuals(ctx, shift);
}

DegenerationCurve degeneration_sweep(const Surface& base,
                                     const std::vector<double>& xi_list) {
  if (base.mode() != CutMode::Focusing)
    throw Error("degeneration sweep is defined for vertical cuts only");
  for (std::size_t i = 0; i + 1 < xi_list.size(); ++i)
    if (!(xi_list[i] > xi_list[i + 1]))
      throw Error("xi values must be strictly decreasing");

  const int g = base.genus();
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::VectorXd> samples;
  for (int k = 0; k < 12; ++k) {
    Eigen::VectorXd om(g);
    for (int i = 0; i < g; ++i) om(i) = u(rng);
    samples.push_back(om);
  }
  for (int m = 1; m < (1 << g); ++m) {  // include the half-period lattice
    Eigen::VectorXd om(g);
    for (int i = 0; i < g; ++i) om(i) = 0.5 * ((m >> i) & 1);
    samples.push_back(om);
  }

  DegenerationCurve curve;
  for (double xi : xi_list) {
    if (!(xi > 0.0 && xi <= 1.0)) throw Error("xi must lie in (0, 1]");
    SurfaceSpec spec;
    for (int j = 0; j <= g; ++j) {
      const cplx a = base.cuts()[static_cast<std::size_t>(j)].end;
      spec.alphas.push_back(j == 0 ? a : cplx(a.real(), xi * a.imag()));
    }
    const Surface s = Surface::validate(spec);
    const AmplitudeContext ctx(s, build_period_data(s));

    DegenerationPoint pt;
    pt.xi = xi;
    for (const Eigen::VectorXd& om : samples)
      pt.sup_f_dev = std::max(
          pt.sup_f_dev, std::abs(ctx.f_value(PhasePoint(om)) - 1.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        ctx.periods().tau.imag());
    pt.lambda_min = es.eigenvalues().minCoeff();
    curve.points.push_back(pt);
  }
  return curve;
}

DefocusingBoundReport dnls_bound_check(const Surface& surf, int nx, int nt,
                                       const std::vector<PhasePoint>& omega0s) {
  if (surf.mode() != CutMode::Defocusing)
    throw Error("dnls bound check requires real bands");
  const AmplitudeContext ctx(surf, build_period_data(surf));

  DefocusingBoundReport rep;
  rep.upper_bound = surf.band_sum();
  const int m = dominant_band(surf);
  rep.dominant = m >= 0;
  if (rep.dominant)
    rep.lower_bound =
        2.0 * surf.band_lengths()[static_cast<std::size_t>(m)] - surf.band_sum();

  rep.min_abs = 1e300;
  for (const PhasePoint& om0 : omega0s) {
    const FieldGrid grid = psi_grid(ctx, -5.0, 5.0, nx, -3.0, 3.0, nt, om0);
    for (const cplx v : grid.samples) {
      rep.max_abs = std::max(rep.max_abs, std::abs(v));
      rep.min_abs = std::min(rep.min_abs, std::abs(v));
    }
  }
  rep.origin_abs =
      std::abs(ctx.psi_value(0.0, 0.0, PhasePoint::zero(surf.genus())));

  rep.pass = rep.max_abs <= rep.upper_bound + 1e-6 &&
             std::abs(rep.origin_abs - rep.upper_bound) < 1e-6 &&
             (!rep.dominant || rep.min_abs >= rep.lower_bound - 1e-6);
  return rep;
}

KdvBound kdv_bound_identity(
    const std::vector<std::pair<double, double>>& bands) {
  if (bands.empty()) throw OrderingViolation("no bands given");
  for (std::size_t j = 0; j < bands.size(); ++j) {
    if (!(bands[j].first < bands[j].second))
      throw OrderingViolation("band endpoints out of order");
    if (j + 1 < bands.size() && !(bands[j].second <= bands[j + 1].first))
      throw OrderingViolation("bands out of order");
  }
  if (!std::isinf(bands.back().second))
    throw OrderingViolation("last band must extend to infinity");

  KdvBound out;
  const double beta0 = bands.front().first;
  const double betag = bands.back().first;
  double widths = 0.0;
  for (std::size_t j = 0; j + 1 < bands.size(); ++j) {
    widths += bands[j].second - bands[j].first;
    out.gap_terms.push_back(bands[j + 1].first - bands[j].second);
  }
  out.bound = (betag - beta0) - widths;
  double gaps = 0.0;
  for (double t : out.gap_terms) gaps += t;
  if (std::abs(out.bound - gaps) > 1e-12 * std::max(1.0, std::abs(gaps)))
    throw Error("gap identity violated");
  return out;
}

double nls_residual(const AmplitudeContext& ctx, double x0, double x1,
                    double t0, double t1, int n, const PhasePoint& omega0,
                    int nonlin_sign) {
  if (n < 32) throw Error("residual grid too coarse");
  const double sigma =
      nonlin_sign != 0
          ? static_cast<double>(nonlin_sign)
          : (ctx.surface().mode() == CutMode::Focusing ? 1.0 : -1.0);
  const FieldGrid grid = psi_grid(ctx, x0, x1, n, t0, t1, n, omega0);
  const double hx = (x1 - x0) / (n - 1);
  const double ht = (t1 - t0) / (n - 1);
  auto at = [&](int i, int j) {
    return grid.samples[static_cast<std::size_t>(i) *
                            static_cast<std::size_t>(n) +
                        static_cast<std::size_t>(j)];
  };
  const cplx I(0.0, 1.0);
  double worst = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    for (int j = 1; j + 1 < n; ++j) {
      const cplx psi = at(i, j);
      const cplx psi_t = (at(i, j + 1) - at(i, j - 1)) / (2.0 * ht);
      const cplx psi_xx =
          (at(i + 1, j) - 2.0 * psi + at(i - 1, j)) / (hx * hx);
      const cplx r =
          I * psi_t + psi_xx + 2.0 * sigma * std::norm(psi) * psi;
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

bool run_check(const AmplitudeContext& ctx, std::ostream& out,
               int grid_per_dim, int refine_steps) {
  using nlohmann::json;
  const Surface& s = ctx.surface();
  const int g = s.genus();
  json checks = json::array();
  bool ok = true;
  auto add = [&](const std::string& name, bool pass, double value) {
    checks.push_back({{"name", name}, {"pass", pass}, {"value", value}});
    ok = ok && pass;
  };

  const double f0 = std::abs(ctx.f_value(PhasePoint::zero(g)) - 1.0);
  add("f_at_origin", f0 < 1e-10, f0);

  const ExtremaReport rep = torus_extrema(ctx, grid_per_dim, refine_steps);
  add("torus_max_is_one", std::abs(rep.max_value - 1.0) < 1e-6, rep.max_value);
  add("global_bound", rep.max_value <= 1.0 + 1e-6, rep.max_value);

  double worst_hp = 0.0, worst_grad = 0.0;
  for (const HalfPeriodRow& row : rep.table) {
    worst_hp = std::max(worst_hp, row.discrepancy);
    if (row.grad_norm) worst_grad = std::max(worst_grad, *row.grad_norm);
  }
  add("half_period_identity", worst_hp < 1e-7, worst_hp);
  add("half_period_criticality", worst_grad < 1e-5, worst_grad);

  const int m = dominant_band(s);
  if (m >= 0) {
    const double predicted =
        (2.0 * s.band_lengths()[static_cast<std::size_t>(m)] - s.band_sum()) /
        s.band_sum();
    add("torus_min_formula", std::abs(rep.min_value - predicted) < 1e-5,
        rep.min_value);
  }

  std::mt19937 rng(211);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double min_theta = 1e300;
  const ThetaContext& th = ctx.theta_ctx();
  const double scale = std::abs(th.theta(Eigen::VectorXcd::Zero(g)));
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXcd z(g);
    for (int i = 0; i < g; ++i) z(i) = u(rng);
    min_theta = std::min(min_theta, std::abs(th.theta(z)) / scale);
  }
  add("theta_positive_on_torus", min_theta > 1e-8, min_theta);

  const DivisorReport div = divisor_check(ctx);
  add("divisor_zeros", div.residual < 1e-5, div.residual);
  add("divisor_involuted_zeros", div.involuted_residual < 1e-5,
      div.involuted_residual);

  Eigen::VectorXd om(g);
  for (int i = 0; i < g; ++i) om(i) = u(rng);
  const double jr = ctx.jump_residual(PhasePoint(om), 8);
  add("jump_condition", jr < 1e-6, jr);

  if (s.mode() == CutMode::Defocusing) {
    const DefocusingBoundReport db =
        dnls_bound_check(s, 21, 13, {PhasePoint::zero(g), PhasePoint(om)});
    add("defocusing_amplitude_bound", db.pass, db.max_abs);
  }

  json doc;
  doc["mode"] = s.mode() == CutMode::Focusing ? "focusing" : "defocusing";
  doc["genus"] = g;
  doc["checks"] = checks;
  doc["pass"] = ok;
  out << doc.dump(2) << "\n";
  return ok;
}

bool run_check(const Surface& surf, std::ostream& out, int grid_per_dim,
               int refine_steps) {
  const AmplitudeContext ctx(surf, build_period_data(surf));
  return run_check(ctx, out, grid_per_dim, refine_steps);
}

}  // namespace fgnls
