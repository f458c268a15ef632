#include "fgnls/periods.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace fgnls {

namespace {

Poly monomial(int k) {
  Poly p(static_cast<std::size_t>(k) + 1, 0.0);
  p.back() = 1.0;
  return p;
}

// Ascending-coefficient polynomial p_k from column k (0-based) of kappa:
// p_k(z) = kappa(0,k) z^{g-1} + ... + kappa(g-1,k).
Poly kappa_column_poly(const Eigen::MatrixXcd& kappa, int k) {
  const int g = static_cast<int>(kappa.rows());
  Poly p(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) p[static_cast<std::size_t>(i)] = kappa(g - 1 - i, k);
  return p;
}

double depth_below(const Surface& surf) {
  if (surf.mode() == CutMode::Focusing) {
    double b = 0.0;
    for (const Cut& c : surf.cuts()) b = std::max(b, c.end.imag());
    return b + 1.0;
  }
  const double span = surf.cuts().back().end.real() - surf.cuts().front().begin.real();
  return 1.0 + 0.25 * span;
}

double far_right(const Surface& surf) {
  double x = surf.cuts().front().begin.real();
  for (const Cut& c : surf.cuts())
    x = std::max({x, c.begin.real(), c.end.real()});
  return x + 2.0;
}

// Horizontal clearance used when routing vertical legs between cuts.
double route_margin(const Surface& surf) {
  std::vector<double> xs;
  for (const Cut& c : surf.cuts()) xs.push_back(c.center.real());
  std::sort(xs.begin(), xs.end());
  double gap = 2.0;
  for (std::size_t i = 1; i < xs.size(); ++i) gap = std::min(gap, xs[i] - xs[i - 1]);
  return std::min(0.35 * gap, 0.4);
}

void append(SheetPath& path, cplx a, cplx b, bool sa = false, bool sb = false) {
  if (std::abs(b - a) == 0.0) return;
  path.segments.push_back({a, b, 1.0, sa, sb});
}

double clearance(const Surface& surf, cplx z) {
  double d = 1e300;
  for (const Cut& c : surf.cuts())
    d = std::min({d, std::abs(z - c.begin), std::abs(z - c.end)});
  return d;
}

// Straight leg from a to b, split into geometrically growing pieces anchored
// at the endpoint nearest the branch points, so Gauss-Legendre converges on
// long far-field legs.
void append_leg(SheetPath& path, const Surface& surf, cplx a, cplx b) {
  const double len = std::abs(b - a);
  if (len == 0.0) return;
  const double ca = clearance(surf, a);
  const double cb = clearance(surf, b);
  const bool from_a = ca <= cb;
  const double step0 = 2.0 * std::max(from_a ? ca : cb, 1e-2);
  if (len <= step0) {
    append(path, a, b);
    return;
  }
  std::vector<double> br{0.0};
  double s = 0.0, step = step0;
  while (s + step < len) {
    s += step;
    br.push_back(s);
    step *= 3.0;
  }
  br.push_back(len);
  const cplx dir = (b - a) / len;
  if (from_a) {
    for (std::size_t i = 0; i + 1 < br.size(); ++i)
      append(path, a + dir * br[i], a + dir * br[i + 1]);
  } else {
    for (std::size_t i = br.size() - 1; i > 0; --i)
      append(path, b - dir * br[i], b - dir * br[i - 1]);
  }
}

}  // namespace

Eigen::MatrixXcd a_matrix(const Surface& surf, const QuadratureOptions& opt) {
  const int g = surf.genus();
  if (g < 1) throw Error("a_matrix requires genus >= 1");
  Eigen::MatrixXcd A(g, g);
  for (int j = 1; j <= g; ++j)
    for (int k = 1; k <= g; ++k)
      A(j - 1, k - 1) =
          loop_integral(surf, {j, Orientation::Negative}, monomial(g - k), opt);
  return A;
}

Eigen::MatrixXcd normalized_differentials(const Surface& surf,
                                          const Eigen::MatrixXcd& A, double* cond) {
  (void)surf;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0.0) || !std::isfinite(smax / smin))
    throw SingularAMatrix("A-cycle matrix is numerically singular");
  const double c = smax / smin;
  if (cond) *cond = c;
  if (c > 1e10)
    std::cerr << "warning: A-cycle matrix condition number " << c << "\n";
  return A.partialPivLu().inverse();
}

SheetPath b_path(const Surface& surf, int j) {
  const double D = depth_below(surf);
  const Cut& c0 = surf.cuts().front();
  const Cut& cj = surf.cuts()[static_cast<std::size_t>(j)];
  SheetPath p;
  append(p, c0.begin, cplx(c0.begin.real(), -D), true, false);
  append(p, cplx(c0.begin.real(), -D), cplx(cj.begin.real(), -D));
  append(p, cplx(cj.begin.real(), -D), cj.begin, false, true);
  return p;
}

Eigen::MatrixXcd period_matrix(const Surface& surf, const Eigen::MatrixXcd& kappa,
                               const QuadratureOptions& opt) {
  const int g = surf.genus();
  Eigen::MatrixXcd tau(g, g);
  for (int j = 1; j <= g; ++j) {
    // The closed B_j cycle runs the template leg backwards on the main sheet
    // and forward on the second sheet, which doubles and negates the leg.
    const SheetPath path = b_path(surf, j);
    for (int k = 0; k < g; ++k)
      tau(k, j - 1) =
          -2.0 * path_integral(surf, path, kappa_column_poly(kappa, k), opt);
  }
  // Re tau is only defined up to integer column shifts (re-routing the B
  // cycles through A cycles).  Snap it to the canonical pattern: 1 on the
  // diagonal and 1/2 off it for conjugate-pair cuts, 0 for real cuts.
  for (int j = 0; j < g; ++j)
    for (int k = 0; k < g; ++k) {
      double target = 0.0;
      if (surf.mode() == CutMode::Focusing) target = (j == k) ? 1.0 : 0.5;
      const double re = tau(k, j).real();
      if (std::abs(re - target - std::round(re - target)) > 1e-6)
        throw Error("B-period real part violates the half-integer pattern");
      tau(k, j) = cplx(target, tau(k, j).imag());
    }
  return tau;
}

SheetPath abel_path(const Surface& surf, cplx z) {
  const double D0 = depth_below(surf);
  const double D = std::max(D0, 1.0 - z.imag());
  const cplx base = surf.cuts().front().begin;
  SheetPath p;

  if (surf.mode() == CutMode::Focusing) {
    double H = 0.0;  // clears all cut tops
    for (const Cut& c : surf.cuts()) H = std::max(H, c.end.imag());
    H += 1.0;
    append(p, base, cplx(base.real(), -D0), true, false);
    append_leg(p, surf, cplx(base.real(), -D0), cplx(base.real(), -D));
    const double margin = route_margin(surf);
    double x_t = z.real();
    for (const Cut& c : surf.cuts()) {
      const double a = c.center.real();
      if (std::abs(z.real() - a) < margin) {
        x_t = (z.real() >= a) ? a + margin : a - margin;
        break;
      }
    }
    append_leg(p, surf, cplx(base.real(), -D), cplx(x_t, -D));
    if (z.imag() > H) {
      append(p, cplx(x_t, -D), cplx(x_t, H));
      append_leg(p, surf, cplx(x_t, H), cplx(x_t, z.imag()));
    } else {
      append(p, cplx(x_t, -D), cplx(x_t, z.imag()));
    }
    append(p, cplx(x_t, z.imag()), z);
    return p;
  }

  // Defocusing: all cuts on the real axis; cross it only outside the bands.
  append(p, base, base - cplx(0.0, D0), true, false);
  append_leg(p, surf, base - cplx(0.0, D0), base - cplx(0.0, D));
  if (z.imag() <= 1e-12) {
    append_leg(p, surf, base - cplx(0.0, D), cplx(z.real(), -D));
    append(p, cplx(z.real(), -D), z);
    return p;
  }
  const double x_out = surf.cuts().front().begin.real() - 1.0;
  append_leg(p, surf, base - cplx(0.0, D0), cplx(x_out, -D0));
  append(p, cplx(x_out, -D0), cplx(x_out, D0));
  append_leg(p, surf, cplx(x_out, D0), cplx(z.real(), D0));
  append_leg(p, surf, cplx(z.real(), D0), z);
  return p;
}

namespace {

// Path ending at a branch point: the begin points reuse the B-path template;
// the end points are approached head-on from above (focusing) / below
// (defocusing).
SheetPath branch_point_path(const Surface& surf, int j, bool to_end) {
  if (!to_end) return b_path(surf, j);
  const Cut& cj = surf.cuts()[static_cast<std::size_t>(j)];
  if (surf.mode() == CutMode::Defocusing) {
    const double D = depth_below(surf);
    const cplx base = surf.cuts().front().begin;
    SheetPath p;
    append(p, base, base - cplx(0.0, D), true, false);
    append(p, base - cplx(0.0, D), cplx(cj.end.real(), -D));
    append(p, cplx(cj.end.real(), -D), cj.end, false, true);
    return p;
  }
  const double D = depth_below(surf);
  const double H = D;  // also clears all cuts from above
  const double margin = route_margin(surf);
  const cplx base = surf.cuts().front().begin;
  const double a = cj.center.real();
  SheetPath p;
  append(p, base, cplx(base.real(), -D), true, false);
  append(p, cplx(base.real(), -D), cplx(a + margin, -D));
  append(p, cplx(a + margin, -D), cplx(a + margin, H));
  append(p, cplx(a + margin, H), cplx(a, H));
  append(p, cplx(a, H), cj.end, false, true);
  return p;
}

}  // namespace

Eigen::VectorXcd abel_map(const Surface& surf, const Eigen::MatrixXcd& kappa,
                          const SheetedPoint& pt, const QuadratureOptions& opt) {
  const int g = surf.genus();
  if (g < 1) throw Error("abel_map requires genus >= 1");
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(g);
  const cplx base = surf.cuts().front().begin;
  if (std::abs(pt.z - base) < 1e-12) return u;

  SheetPath path;
  bool built = false;
  for (int j = 0; j <= g && !built; ++j) {
    const Cut& c = surf.cuts()[static_cast<std::size_t>(j)];
    if (std::abs(pt.z - c.begin) < 1e-12) {
      path = branch_point_path(surf, j, false);
      built = true;
    } else if (std::abs(pt.z - c.end) < 1e-12) {
      path = branch_point_path(surf, j, true);
      built = true;
    }
  }
  if (!built) {
    if (surf.near_cut(pt.z))
      throw OnBranchCut("abel_map target lies on a branch cut");
    path = abel_path(surf, pt.z);
  }

  for (int k = 0; k < g; ++k)
    u(k) = path_integral(surf, path, kappa_column_poly(kappa, k), opt);
  return pt.sheet == Sheet::Main ? u : Eigen::VectorXcd(-u);
}

std::vector<cplx> inverse_R_series(const Surface& surf, int n) {
  // Product of the binomial series (1 - c u)^{-1/2} over all 2g+2 roots.
  std::vector<cplx> s(static_cast<std::size_t>(n) + 1, 0.0);
  s[0] = 1.0;
  auto mul_factor = [&](cplx c) {
    std::vector<cplx> f(s.size(), 0.0);
    f[0] = 1.0;
    double binom = 1.0;  // C(2m, m) / 4^m
    for (std::size_t m = 1; m < f.size(); ++m) {
      binom *= (2.0 * m - 1.0) / (2.0 * m);
      f[m] = binom * std::pow(c, static_cast<double>(m));
    }
    std::vector<cplx> out(s.size(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; i + j < s.size(); ++j) out[i + j] += s[i] * f[j];
    s = std::move(out);
  };
  for (const Cut& c : surf.cuts()) {
    mul_factor(c.begin);
    mul_factor(c.end);
  }
  return s;
}

namespace {

// Coefficient of z^{p} in P(z)/R(z) for large z on the main sheet.
cplx series_coeff(const Poly& P, const std::vector<cplx>& s, int gp1, int p) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const int n = static_cast<int>(i) - gp1 - p;
    if (n >= 0 && n < static_cast<int>(s.size())) acc += P[i] * s[static_cast<std::size_t>(n)];
  }
  return acc;
}

// Integral of P/R minus its polynomial part from z0 to infinity along a ray,
// using the asymptotic series.  poly_terms is the number of leading powers
// (z^{poly_terms-1} ... z^0) that belong to the polynomial part and whose
// series coefficients must already vanish or be excluded.
cplx series_tail(const Poly& P, const std::vector<cplx>& s, int gp1, cplx z0,
                 int max_m = 60) {
  cplx acc = 0.0;
  double last = 0.0;
  for (int m = 2; m <= max_m; ++m) {
    const cplx cm = series_coeff(P, s, gp1, -m);
    const cplx term = cm * std::pow(z0, 1.0 - m) / (m - 1.0);
    acc += term;
    last = std::abs(term);
    if (last < 1e-16 * std::max(1.0, std::abs(acc)) && m > 6) return acc;
  }
  if (last > 1e-13 * std::max(1.0, std::abs(acc)))
    throw TailNotConverged("far-field series tail did not converge");
  return acc;
}

// Main-sheet path from the base point out to z0 = x_far + i*Y.
SheetPath far_field_path(const Surface& surf, double x_far, double Y) {
  const double D = depth_below(surf);
  const cplx base = surf.cuts().front().begin;
  SheetPath p;
  append(p, base, cplx(base.real(), -D), true, false);
  append_leg(p, surf, cplx(base.real(), -D), cplx(x_far, -D));
  append_leg(p, surf, cplx(x_far, -D), cplx(x_far, Y));
  return p;
}

}  // namespace

Eigen::VectorXcd u_infinity(const Surface& surf, const Eigen::MatrixXcd& kappa,
                            const QuadratureOptions& opt) {
  const int g = surf.genus();
  if (g < 1) throw Error("u_infinity requires genus >= 1");
  const double x_far = far_right(surf);
  const double Y = 1e4;
  const cplx z0(x_far, Y);
  const SheetPath path = far_field_path(surf, x_far, Y);
  const std::vector<cplx> s = inverse_R_series(surf, 60);
  Eigen::VectorXcd u(g);
  for (int k = 0; k < g; ++k) {
    const Poly pk = kappa_column_poly(kappa, k);
    u(k) = path_integral(surf, path, pk, opt) + series_tail(pk, s, g + 1, z0);
  }
  return u;
}

Eigen::VectorXcd riemann_constants(const Surface& surf, const Eigen::MatrixXcd& kappa,
                                   const QuadratureOptions& opt) {
  const int g = surf.genus();
  Eigen::VectorXcd K = Eigen::VectorXcd::Zero(g);
  for (int j = 1; j <= g; ++j)
    K += abel_map(surf, kappa, {surf.cuts()[static_cast<std::size_t>(j)].begin}, opt);
  return K;
}

SecondKind second_kind_periods(const Surface& surf, const QuadratureOptions& opt) {
  const int g = surf.genus();
  const std::vector<cplx> s = inverse_R_series(surf, 60);
  const cplx s1 = s[1];
  const cplx s2 = s[2];

  // Fixed top coefficients from the principal parts at infinity.
  Poly dp(static_cast<std::size_t>(g) + 2, 0.0);  // monic, degree g+1
  dp[static_cast<std::size_t>(g) + 1] = 1.0;
  dp[static_cast<std::size_t>(g)] = -s1;
  Poly dq(static_cast<std::size_t>(g) + 3, 0.0);  // leading 2 z^{g+2}
  dq[static_cast<std::size_t>(g) + 2] = 2.0;
  dq[static_cast<std::size_t>(g) + 1] = -2.0 * s1;
  dq[static_cast<std::size_t>(g)] = -2.0 * s2 + 2.0 * s1 * s1;

  if (g >= 1) {
    // Loop integrals of all needed monomials around each A-cycle.
    Eigen::MatrixXcd M(g, g + 3);
    for (int j = 1; j <= g; ++j)
      for (int i = 0; i <= g + 2; ++i)
        M(j - 1, i) = loop_integral(surf, {j, Orientation::Negative}, monomial(i), opt);

    Eigen::MatrixXcd lhs = M.leftCols(g);
    Eigen::VectorXcd rhs_p = Eigen::VectorXcd::Zero(g);
    Eigen::VectorXcd rhs_q = Eigen::VectorXcd::Zero(g);
    for (int i = g; i <= g + 2; ++i) {
      if (i < static_cast<int>(dp.size()))
        rhs_p -= dp[static_cast<std::size_t>(i)] * M.col(i);
      rhs_q -= dq[static_cast<std::size_t>(i)] * M.col(i);
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lhs);
    const Eigen::VectorXcd low_p = lu.solve(rhs_p);
    const Eigen::VectorXcd low_q = lu.solve(rhs_q);
    if (!low_p.allFinite() || !low_q.allFinite())
      throw SingularNormalizationSystem("A-period normalization solve failed");
    for (int i = 0; i < g; ++i) {
      dp[static_cast<std::size_t>(i)] = low_p(i);
      dq[static_cast<std::size_t>(i)] = low_q(i);
    }
  }

  SecondKind sk;
  sk.dp_num = dp;
  sk.dq_num = dq;
  sk.V_raw.resize(g);
  sk.W_raw.resize(g);
  sk.V.resize(g);
  sk.W.resize(g);
  for (int j = 1; j <= g; ++j) {
    const SheetPath bp = b_path(surf, j);
    sk.V_raw(j - 1) = -2.0 * path_integral(surf, bp, dp, opt);
    sk.W_raw(j - 1) = -2.0 * path_integral(surf, bp, dq, opt);
    sk.V(j - 1) = sk.V_raw(j - 1).real();
    sk.W(j - 1) = sk.W_raw(j - 1).real();
  }

  // Constants of the Abelian integrals p ~ z + p_const, q ~ z^2 + q_const,
  // with the integration constant fixed at the base branch point.
  const double x_far = far_right(surf);
  const double Y = 1e4;
  const cplx z0(x_far, Y);
  const SheetPath far = far_field_path(surf, x_far, Y);
  const cplx p_at_z0 = path_integral(surf, far, dp, opt);
  const cplx q_at_z0 = path_integral(surf, far, dq, opt);
  sk.p_const = p_at_z0 - z0 + series_tail(dp, s, g + 1, z0);
  sk.q_const = q_at_z0 - z0 * z0 + series_tail(dq, s, g + 1, z0);
  return sk;
}

PeriodData build_period_data(const Surface& surf, const QuadratureOptions& opt) {
  PeriodData pd{surf, {}, {}, {}, {}, {}, {}, surf.cuts().front().begin, 0.0};
  pd.A = a_matrix(surf, opt);
  pd.kappa = normalized_differentials(surf, pd.A, &pd.cond_A);
  pd.tau = period_matrix(surf, pd.kappa, opt);
  pd.u_inf = u_infinity(surf, pd.kappa, opt);
  pd.riemann_k = riemann_constants(surf, pd.kappa, opt);
  pd.sk = second_kind_periods(surf, opt);
  return pd;
}

Eigen::VectorXcd lattice_reduce_vector(const Eigen::MatrixXcd& tau,
                                       const Eigen::VectorXcd& z,
                                       Eigen::VectorXd* lambda_out,
                                       Eigen::VectorXd* mu_out) {
  const Eigen::MatrixXd Y = tau.imag();
  const Eigen::VectorXd lam_real = Y.ldlt().solve(z.imag());
  Eigen::VectorXd lam = lam_real.array().round();
  Eigen::VectorXcd r = z - tau * lam.cast<cplx>();
  Eigen::VectorXd mu = r.real().array().round();
  r -= mu.cast<cplx>();
  if (lambda_out) *lambda_out = lam;
  if (mu_out) *mu_out = mu;
  return r;
}

bool lattice_equal(const Eigen::MatrixXcd& tau, const Eigen::VectorXcd& a,
                   const Eigen::VectorXcd& b, double tol) {
  const Eigen::VectorXcd r = lattice_reduce_vector(tau, a - b);
  return r.cwiseAbs().maxCoeff() < tol;
}

}  // namespace fgnls
