#include "fgnls/surface.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fgnls {

namespace {

// Multiply the ascending-coefficient polynomial p by (z - root).
void mul_linear(std::vector<cplx>& p, cplx root) {
  p.push_back(0.0);
  for (std::size_t i = p.size() - 1; i > 0; --i) p[i] = p[i - 1] - root * p[i];
  p[0] *= -root;
}

std::vector<cplx> poly_from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> p{1.0};
  for (cplx r : roots) mul_linear(p, r);
  return p;
}

cplx poly_eval_local(const std::vector<cplx>& p, cplx z) {
  cplx acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * z + p[i];
  return acc;
}

double point_segment_distance(cplx z, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  double t = len2 > 0 ? ((z - a) * std::conj(d)).real() / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (a + t * d));
}

}  // namespace

Surface Surface::validate(const SurfaceSpec& spec) {
  Surface s;
  s.mode_ = spec.mode;
  if (spec.mode == CutMode::Focusing) {
    if (spec.alphas.empty()) throw OrderingViolation("no branch points given");
    for (std::size_t i = 0; i < spec.alphas.size(); ++i) {
      for (std::size_t j = i + 1; j < spec.alphas.size(); ++j) {
        if (spec.alphas[i] == spec.alphas[j])
          throw DuplicateBranchPoint("repeated branch point");
      }
    }
    for (cplx a : spec.alphas) {
      if (!(a.imag() > 0.0))
        throw NonPositiveBandHeight("branch point not in upper half plane");
    }
    // Vertical Schwarz-symmetric cuts all cross the real axis, so two cuts
    // on the same vertical line always intersect.
    for (std::size_t i = 0; i < spec.alphas.size(); ++i) {
      for (std::size_t j = i + 1; j < spec.alphas.size(); ++j) {
        if (std::abs(spec.alphas[i].real() - spec.alphas[j].real()) < 1e-12)
          throw OverlappingCuts("two cuts share a vertical line");
      }
    }
    for (cplx a : spec.alphas) {
      Cut c;
      c.begin = std::conj(a);
      c.end = a;
      c.center = cplx(a.real(), 0.0);
      c.half = cplx(0.0, a.imag());
      c.band_half_length = a.imag();
      s.cuts_.push_back(c);
    }
  } else {
    if (spec.bands.empty()) throw OrderingViolation("no bands given");
    std::vector<double> pts;
    for (auto [beta, alpha] : spec.bands) {
      pts.push_back(beta);
      pts.push_back(alpha);
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (pts[i] == pts[i + 1]) throw DuplicateBranchPoint("repeated endpoint");
      if (!(pts[i] < pts[i + 1]))
        throw OrderingViolation("band endpoints not strictly interlaced");
    }
    for (auto [beta, alpha] : spec.bands) {
      Cut c;
      c.begin = beta;
      c.end = alpha;
      c.center = 0.5 * (beta + alpha);
      c.half = 0.5 * (alpha - beta);
      c.band_half_length = 0.5 * (alpha - beta);
      s.cuts_.push_back(c);
    }
  }
  for (const Cut& c : s.cuts_) s.band_.push_back(c.band_half_length);
  s.band_sum_ = 0.0;
  for (double b : s.band_) s.band_sum_ += b;
  return s;
}

cplx Surface::cut_point(int j, double t) const {
  const Cut& c = cuts_[static_cast<std::size_t>(j)];
  return c.center + c.half * t;
}

double Surface::cut_distance(cplx z) const {
  double d = std::numeric_limits<double>::infinity();
  for (const Cut& c : cuts_) d = std::min(d, point_segment_distance(z, c.begin, c.end));
  return d;
}

bool Surface::near_cut(cplx z, double tol) const { return cut_distance(z) < tol; }

cplx Surface::cut_factor(int j, cplx z) const {
  const Cut& c = cuts_[static_cast<std::size_t>(j)];
  const cplx w = (z - c.center) / c.half;
  // h * w * sqrt(1 - 1/w^2): principal sqrt puts the branch cut exactly on
  // w in [-1, 1], i.e. on the segment, and the factor ~ z at infinity.
  return c.half * w * std::sqrt(1.0 - 1.0 / (w * w));
}

cplx Surface::quartic_factor(int j, cplx z) const {
  const Cut& c = cuts_[static_cast<std::size_t>(j)];
  const cplx w = (z - c.center) / c.half;
  // The Moebius map (w-1)/(w+1) sends [-1,1] to the negative real axis and
  // infinity to 1, so the principal quartic root has its cut on the segment.
  return std::pow((w - 1.0) / (w + 1.0), 0.25);
}

cplx Surface::eval_R(const SheetedPoint& p) const {
  if (near_cut(p.z)) throw OnBranchCut("eval_R on a branch cut");
  cplx r = 1.0;
  for (int j = 0; j <= genus(); ++j) r *= cut_factor(j, p.z);
  return p.sheet == Sheet::Main ? r : -r;
}

cplx Surface::eval_R_unguarded(cplx z) const {
  cplx r = 1.0;
  for (int j = 0; j <= genus(); ++j) r *= cut_factor(j, z);
  return r;
}

cplx Surface::reduced_R(int j, double t) const {
  const cplx z = cut_point(j, t);
  cplx r = 1.0;
  for (int k = 0; k <= genus(); ++k)
    if (k != j) r *= cut_factor(k, z);
  return r;
}

cplx Surface::eval_R_boundary(int j, double t, CutSide side, Sheet sheet) const {
  const Cut& c = cuts_[static_cast<std::size_t>(j)];
  // One-sided limit of the local factor: +i h sqrt(1-t^2) from the Plus
  // (left-of-orientation) side, which is the Im w > 0 side in both modes.
  const cplx sgn = (side == CutSide::Plus) ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
  const cplx local = c.half * sgn * std::sqrt(std::max(0.0, 1.0 - t * t));
  const cplx r = local * reduced_R(j, t);
  return sheet == Sheet::Main ? r : -r;
}

cplx Surface::eval_lambda(cplx z) const {
  if (near_cut(z)) throw OnBranchCut("eval_lambda on a branch cut");
  cplx l = 1.0;
  for (int j = 0; j <= genus(); ++j) l *= quartic_factor(j, z);
  return l;
}

cplx Surface::lambda_boundary(int j, double t, CutSide side) const {
  const cplx z = cut_point(j, t);
  // |ratio|^(1/4) with the one-sided phase exp(+-i pi/4).
  const double mag = std::pow((1.0 - t) / (1.0 + t), 0.25);
  const double ph = (side == CutSide::Plus) ? M_PI / 4.0 : -M_PI / 4.0;
  cplx l = mag * std::polar(1.0, ph);
  for (int k = 0; k <= genus(); ++k)
    if (k != j) l *= quartic_factor(k, z);
  return l;
}

cplx Surface::lambda_sq(cplx z) const {
  if (near_cut(z)) throw OnBranchCut("lambda_sq on a branch cut");
  cplx l = 1.0;
  for (int j = 0; j <= genus(); ++j) {
    const Cut& c = cuts_[static_cast<std::size_t>(j)];
    const cplx w = (z - c.center) / c.half;
    l *= std::sqrt((w - 1.0) / (w + 1.0));
  }
  return l;
}

std::vector<cplx> Surface::lambda_numerator_poly() const {
  std::vector<cplx> ends, begins;
  for (const Cut& c : cuts_) {
    ends.push_back(c.end);
    begins.push_back(c.begin);
  }
  std::vector<cplx> pe = poly_from_roots(ends);
  std::vector<cplx> pb = poly_from_roots(begins);
  std::vector<cplx> num(pe.size());
  for (std::size_t i = 0; i < pe.size(); ++i) num[i] = pe[i] - pb[i];
  // The degree-(g+1) terms cancel; the z^g coefficient is -2 sum h_j != 0.
  num.pop_back();
  return num;
}

Divisor Surface::divisor_D0() const {
  const int g = genus();
  Divisor d;
  if (g == 0) return d;
  std::vector<cplx> num = lambda_numerator_poly();
  const cplx lead = num.back();
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(g, g);
  for (int i = 1; i < g; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < g; ++i) comp(i, g - 1) = -num[static_cast<std::size_t>(i)] / lead;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success)
    throw RootFindingFailure("companion eigenvalue iteration failed");

  std::vector<cplx> dnum(num.size() - 1);
  for (std::size_t i = 1; i < num.size(); ++i) dnum[i - 1] = num[i] * static_cast<double>(i);

  double scale = 0.0;
  for (const Cut& c : cuts_) scale = std::max(scale, std::abs(c.end));
  scale = std::max(scale, 1.0);

  std::vector<double> roots;
  for (int i = 0; i < g; ++i) {
    cplx r = es.eigenvalues()(i);
    for (int it = 0; it < 3; ++it) {
      const cplx dv = poly_eval_local(dnum, r);
      if (dv == cplx(0.0)) break;
      r -= poly_eval_local(num, r) / dv;
    }
    if (std::abs(r.imag()) > 1e-8 * scale)
      throw RootFindingFailure("non-real zero of the lambda^4 - 1 numerator");
    roots.push_back(r.real());
  }
  std::sort(roots.begin(), roots.end(), std::greater<double>());

  for (double z : roots) {
    const cplx l2 = lambda_sq(cplx(z, 0.0));
    SheetedPoint p;
    p.z = cplx(z, 0.0);
    if (std::abs(l2 - 1.0) < std::abs(l2 + 1.0)) {
      p.sheet = Sheet::Main;
      if (std::abs(l2 - 1.0) > 1e-7)
        throw RootFindingFailure("sheet sign test inconclusive");
    } else {
      p.sheet = Sheet::Second;
      if (std::abs(l2 + 1.0) > 1e-7)
        throw RootFindingFailure("sheet sign test inconclusive");
    }
    d.points.push_back(p);
  }
  return d;
}

}  // namespace fgnls
