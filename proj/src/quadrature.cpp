#include "fgnls/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace fgnls {

cplx poly_eval(const Poly& p, cplx z) {
  cplx acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * z + p[i];
  return acc;
}

cplx gauss_chebyshev(const std::function<cplx(double)>& f, int n) {
  cplx sum = 0.0;
  const double w = M_PI / n;
  for (int i = 1; i <= n; ++i) sum += f(std::cos((2 * i - 1) * M_PI / (2 * n)));
  return w * sum;
}

const std::pair<std::vector<double>, std::vector<double>>& legendre_rule01(int n) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev initial guess.
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = 0.5 * (t + 1.0);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
  return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

cplx gauss_legendre01(const std::function<cplx(double)>& f, int n) {
  const auto& [x, w] = legendre_rule01(n);
  cplx sum = 0.0;
  for (int i = 0; i < n; ++i) sum += w[i] * f(x[i]);
  return sum;
}

cplx loop_integral(const Surface& surf, CutLoop loop, const Poly& numerator,
                   const QuadratureOptions& opt) {
  const Cut& c = surf.cuts()[static_cast<std::size_t>(loop.index)];
  // Collapsing a counterclockwise loop onto the cut gives
  //   2i * int_{-1}^{1} num(m + h t) / (rho(t) sqrt(1 - t^2)) dt
  // with rho = R with the local singular pair of this cut divided out.
  auto f = [&](double t) -> cplx {
    return poly_eval(numerator, c.center + c.half * t) / surf.reduced_R(loop.index, t);
  };
  cplx prev = gauss_chebyshev(f, opt.start_n);
  for (int n = 2 * opt.start_n; n <= opt.max_n; n *= 2) {
    const cplx cur = gauss_chebyshev(f, n);
    if (std::abs(cur - prev) < opt.tol * std::max(1.0, std::abs(cur))) {
      prev = cur;
      const cplx val = cplx(0.0, 2.0) * prev;
      return loop.orientation == Orientation::Positive ? val : -val;
    }
    prev = cur;
  }
  throw QuadratureNonConvergence("loop integral did not stabilize");
}

namespace {

double cross2(cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }

// Does segment [p, p+r] meet segment [q, q+s] at an interior point of the
// first one (more than tol away from its endpoints)?
bool interior_intersect(cplx p, cplx r, cplx q, cplx s, double tol) {
  const double rxs = cross2(r, s);
  const cplx qp = q - p;
  const double scale = std::max({std::abs(r), std::abs(s), 1e-300});
  if (std::abs(rxs) < 1e-14 * scale * scale) {
    // Parallel.  Collinear overlap counts as crossing.
    if (std::abs(cross2(qp, r)) > 1e-12 * scale * scale) return false;
    const double rr = std::norm(r);
    if (rr == 0.0) return false;
    double t0 = (qp * std::conj(r)).real() / rr;
    double t1 = t0 + (s * std::conj(r)).real() / rr;
    if (t0 > t1) std::swap(t0, t1);
    const double lo = std::max(t0, tol / std::abs(r));
    const double hi = std::min(t1, 1.0 - tol / std::abs(r));
    return hi - lo > tol / std::abs(r);
  }
  const double t = cross2(qp, s) / rxs;
  const double u = cross2(qp, r) / rxs;
  const double tt = tol / std::max(std::abs(r), 1e-300);
  const double tu = tol / std::max(std::abs(s), 1e-300);
  return t > tt && t < 1.0 - tt && u > -tu && u < 1.0 + tu;
}

}  // namespace

void check_path(const Surface& surf, const SheetPath& path) {
  const double tol = 1e-9;
  for (const PathSegment& seg : path.segments) {
    const cplx r = seg.b - seg.a;
    if (std::abs(r) == 0.0) continue;
    for (const Cut& c : surf.cuts()) {
      if (interior_intersect(seg.a, r, c.begin, c.end - c.begin, tol))
        throw PathCrossesCut("path segment crosses a branch cut");
    }
  }
}

namespace {

cplx segment_integral(const Surface& surf, const Poly& num, cplx a, cplx b,
                      double sheet_sign, bool sing_a, bool sing_b,
                      const QuadratureOptions& opt) {
  if (std::abs(b - a) == 0.0) return 0.0;
  if (sing_a && sing_b) {
    const cplx mid = 0.5 * (a + b);
    return segment_integral(surf, num, a, mid, sheet_sign, true, false, opt) +
           segment_integral(surf, num, mid, b, sheet_sign, false, true, opt);
  }
  if (sing_b)
    return -segment_integral(surf, num, b, a, sheet_sign, true, false, opt);

  std::function<cplx(double)> f;
  const cplx d = b - a;
  if (sing_a) {
    // z = a + d u^2 flattens the inverse-square-root endpoint singularity.
    f = [&surf, &num, a, d, sheet_sign](double u) -> cplx {
      const cplx z = a + d * (u * u);
      return sheet_sign * poly_eval(num, z) / surf.eval_R_unguarded(z) * 2.0 * u * d;
    };
  } else {
    f = [&surf, &num, a, d, sheet_sign](double s) -> cplx {
      const cplx z = a + d * s;
      return sheet_sign * poly_eval(num, z) / surf.eval_R_unguarded(z) * d;
    };
  }
  cplx prev = gauss_legendre01(f, opt.start_n);
  for (int n = 2 * opt.start_n; n <= opt.max_n; n *= 2) {
    const cplx cur = gauss_legendre01(f, n);
    if (std::abs(cur - prev) < opt.tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw QuadratureNonConvergence("path segment integral did not stabilize");
}

}  // namespace

cplx path_integral(const Surface& surf, const SheetPath& path, const Poly& numerator,
                   const QuadratureOptions& opt) {
  check_path(surf, path);
  cplx total = 0.0;
  for (const PathSegment& seg : path.segments)
    total += segment_integral(surf, numerator, seg.a, seg.b, seg.sheet_sign,
                              seg.singular_a, seg.singular_b, opt);
  return total;
}

}  // namespace fgnls
