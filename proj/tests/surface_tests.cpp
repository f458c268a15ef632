#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fgnls/surface.hpp"

using namespace fgnls;

namespace {

SurfaceSpec paper_g2() {
  SurfaceSpec s;
  s.mode = CutMode::Focusing;
  s.alphas = {{0.1, 2.0}, {0.0, 0.5}, {-0.1, 1.0}};
  return s;
}

// Track sqrt(prod (z-end)(z-begin)) continuously along a list of points,
// starting from the principal-product value at the first (far, real) point.
cplx track_R(const Surface& surf, const std::vector<cplx>& pts) {
  auto P = [&](cplx z) {
    cplx p = 1.0;
    for (const Cut& c : surf.cuts()) p *= (z - c.begin) * (z - c.end);
    return p;
  };
  cplx val = surf.eval_R({pts.front(), Sheet::Main});
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const cplx s = std::sqrt(P(pts[i]));
    val = (std::abs(s - val) <= std::abs(-s - val)) ? s : -s;
  }
  return val;
}

std::vector<cplx> line_points(cplx a, cplx b, int n) {
  std::vector<cplx> pts;
  for (int i = 0; i <= n; ++i) pts.push_back(a + (b - a) * (double(i) / n));
  return pts;
}

SurfaceSpec random_focusing(std::mt19937& rng, int g) {
  std::uniform_real_distribution<double> jit(-0.15, 0.15), ht(0.3, 1.8);
  SurfaceSpec s;
  s.mode = CutMode::Focusing;
  for (int j = 0; j <= g; ++j)
    s.alphas.push_back({-2.0 + 4.0 * j / std::max(1, g) + jit(rng), ht(rng)});
  return s;
}

}  // namespace

TEST_CASE("validation accepts the reference g=2 surface") {
  Surface s = Surface::validate(paper_g2());
  CHECK(s.genus() == 2);
  CHECK(s.band_lengths()[0] == doctest::Approx(2.0));
  CHECK(s.band_lengths()[1] == doctest::Approx(0.5));
  CHECK(s.band_lengths()[2] == doctest::Approx(1.0));
  CHECK(s.band_sum() == doctest::Approx(3.5));
}

TEST_CASE("validation rejects bad input") {
  SurfaceSpec dup;
  dup.alphas = {{0.0, 1.0}, {0.0, 1.0}};
  CHECK_THROWS_AS((void)Surface::validate(dup), DuplicateBranchPoint);

  SurfaceSpec low;
  low.alphas = {{0.0, 1.0}, {1.0, -0.5}};
  CHECK_THROWS_AS((void)Surface::validate(low), NonPositiveBandHeight);

  SurfaceSpec same_line;
  same_line.alphas = {{0.2, 1.0}, {0.2, 2.0}};
  CHECK_THROWS_AS((void)Surface::validate(same_line), OverlappingCuts);

  SurfaceSpec bad_bands;
  bad_bands.mode = CutMode::Defocusing;
  bad_bands.bands = {{0.0, 1.0}, {0.5, 2.0}};
  CHECK_THROWS_AS((void)Surface::validate(bad_bands), OrderingViolation);
}

TEST_CASE("R is normalized at infinity and sheet-antisymmetric") {
  Surface s = Surface::validate(paper_g2());
  const cplx z = 1e6;
  const cplx r = s.eval_R({z, Sheet::Main});
  CHECK(std::abs(r / (z * z * z) - 1.0) < 1e-5);
  CHECK(s.eval_R({z, Sheet::Second}) == -r);
}

TEST_CASE("boundary values of R differ by a sign across each cut") {
  Surface s = Surface::validate(paper_g2());
  for (int j = 0; j <= s.genus(); ++j) {
    for (double t : {-0.7, 0.0, 0.4, 0.9}) {
      const cplx rp = s.eval_R_boundary(j, t, CutSide::Plus);
      const cplx rm = s.eval_R_boundary(j, t, CutSide::Minus);
      CHECK(std::abs(rp + rm) < 1e-12 * std::abs(rp));
    }
  }
}

TEST_CASE("boundary values match one-sided limits of eval_R") {
  Surface s = Surface::validate(paper_g2());
  const double eps = 1e-8;
  for (int j = 0; j <= s.genus(); ++j) {
    const double t = 0.3;
    const cplx z = s.cut_point(j, t);
    // Plus side is the left of the upward orientation, i.e. smaller Re z.
    const cplx lim_p = s.eval_R({z - eps, Sheet::Main});
    const cplx lim_m = s.eval_R({z + eps, Sheet::Main});
    CHECK(std::abs(lim_p - s.eval_R_boundary(j, t, CutSide::Plus)) <
          1e-5 * std::abs(lim_p));
    CHECK(std::abs(lim_m - s.eval_R_boundary(j, t, CutSide::Minus)) <
          1e-5 * std::abs(lim_m));
  }
}

TEST_CASE("R matches a path-tracking continuation oracle") {
  Surface s = Surface::validate(paper_g2());
  std::vector<cplx> pts;
  // Come in from far on the real axis, staying right of all cuts.
  for (int i = 0; i <= 200; ++i) pts.push_back(1e6 * std::pow(1e-5, i / 200.0));
  auto tail = line_points(10.0, cplx(1.0, 0.3), 400);
  pts.insert(pts.end(), tail.begin(), tail.end());
  const cplx tracked = track_R(s, pts);
  const cplx direct = s.eval_R({cplx(1.0, 0.3), Sheet::Main});
  CHECK(std::abs(tracked - direct) < 1e-10 * std::abs(direct));
}

TEST_CASE("continuation around one branch point flips the sign of R") {
  Surface s = Surface::validate(paper_g2());
  const cplx center(0.1, 2.0);  // alpha_0
  const double rad = 0.4;
  std::vector<cplx> pts;
  for (int i = 0; i <= 720; ++i)
    pts.push_back(center + rad * std::polar(1.0, 2.0 * M_PI * i / 720.0));
  auto P = [&](cplx z) {
    cplx p = 1.0;
    for (const Cut& c : s.cuts()) p *= (z - c.begin) * (z - c.end);
    return p;
  };
  cplx val = std::sqrt(P(pts.front()));
  const cplx start = val;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const cplx q = std::sqrt(P(pts[i]));
    val = (std::abs(q - val) <= std::abs(-q - val)) ? q : -q;
  }
  CHECK(std::abs(val + start) < 1e-8 * std::abs(start));
}

TEST_CASE("continuation around a whole cut returns the same value of R") {
  Surface s = Surface::validate(paper_g2());
  // Tight rectangle around cut 1 (the short one at the origin), narrow
  // enough to exclude the neighbouring cuts at Re z = +-0.1.
  std::vector<cplx> pts;
  const double w = 0.05, h = 0.55;
  auto rect = [&](cplx a, cplx b) {
    auto seg = line_points(a, b, 400);
    pts.insert(pts.end(), seg.begin(), seg.end());
  };
  rect({w, -h}, {w, h});
  rect({w, h}, {-w, h});
  rect({-w, h}, {-w, -h});
  rect({-w, -h}, {w, -h});
  auto P = [&](cplx z) {
    cplx p = 1.0;
    for (const Cut& c : s.cuts()) p *= (z - c.begin) * (z - c.end);
    return p;
  };
  cplx val = std::sqrt(P(pts.front()));
  const cplx start = val;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const cplx q = std::sqrt(P(pts[i]));
    val = (std::abs(q - val) <= std::abs(-q - val)) ? q : -q;
  }
  CHECK(std::abs(val - start) < 1e-8 * std::abs(start));
}

TEST_CASE("lambda normalization and unimodularity on the real axis") {
  Surface s = Surface::validate(paper_g2());
  CHECK(std::abs(s.eval_lambda(1e6) - 1.0) < 1e-5);
  const cplx l = s.eval_lambda(3.7);
  CHECK(std::abs(std::abs(std::pow(l, 4)) - 1.0) < 1e-12);
}

TEST_CASE("lambda matches a continuation oracle at 1+2i") {
  Surface s = Surface::validate(paper_g2());
  auto ratio = [&](cplx z) {
    cplx p = 1.0;
    for (const Cut& c : s.cuts()) p *= (z - c.end) / (z - c.begin);
    return p;
  };
  std::vector<cplx> pts;
  for (int i = 0; i <= 200; ++i) pts.push_back(1e6 * std::pow(1e-5, i / 200.0));
  auto tail = line_points(10.0, cplx(1.0, 2.0), 800);
  pts.insert(pts.end(), tail.begin(), tail.end());
  cplx val = std::pow(ratio(pts.front()), 0.25);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const cplx p = std::pow(ratio(pts[i]), 0.25);
    cplx best = p;
    for (int k = 1; k < 4; ++k) {
      const cplx cand = p * std::polar(1.0, M_PI_2 * k);
      if (std::abs(cand - val) < std::abs(best - val)) best = cand;
    }
    val = best;
  }
  const cplx direct = s.eval_lambda(cplx(1.0, 2.0));
  CHECK(std::abs(val - direct) < 1e-9 * std::abs(direct));
}

TEST_CASE("lambda boundary values: plus side is i times minus side") {
  Surface s = Surface::validate(paper_g2());
  for (int j = 0; j <= s.genus(); ++j) {
    const cplx lp = s.lambda_boundary(j, 0.2, CutSide::Plus);
    const cplx lm = s.lambda_boundary(j, 0.2, CutSide::Minus);
    CHECK(std::abs(lp - cplx(0, 1) * lm) < 1e-12 * std::abs(lp));
    const double eps = 1e-8;
    const cplx z = s.cut_point(j, 0.2);
    CHECK(std::abs(s.eval_lambda(z - eps) - lp) < 1e-5 * std::abs(lp));
    CHECK(std::abs(s.eval_lambda(z + eps) - lm) < 1e-5 * std::abs(lm));
  }
}

TEST_CASE("Schwarz symmetry of lambda") {
  Surface s = Surface::validate(paper_g2());
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.05, 3.0);
  for (int i = 0; i < 40; ++i) {
    const cplx z(re(rng), im(rng));
    if (s.near_cut(z, 1e-3) || s.near_cut(std::conj(z), 1e-3)) continue;
    const double m = std::abs(s.eval_lambda(std::conj(z)) * std::conj(s.eval_lambda(z)));
    CHECK(std::abs(m - 1.0) < 1e-10);
  }
}

TEST_CASE("divisor of lambda^2 -+ 1 on the reference surface") {
  Surface s = Surface::validate(paper_g2());
  Divisor d = s.divisor_D0();
  REQUIRE(d.points.size() == 2);
  CHECK(d.points[0].z.real() > d.points[1].z.real());
  // Both roots lie outside the band of cuts here and carry lambda^2 = -1 on
  // the principal branch, so both zeros of lambda^2 - 1 are on the second
  // sheet.  The sign test below is the authoritative assignment; it is
  // validated end to end by the theta divisor residual in the analysis suite.
  for (const SheetedPoint& p : d.points) {
    const cplx l2 = s.lambda_sq(p.z) * (p.sheet == Sheet::Main ? 1.0 : -1.0);
    CHECK(std::abs(l2 - 1.0) < 1e-8);
    CHECK(std::abs(std::pow(s.eval_lambda(p.z), 4) - 1.0) < 1e-8);
  }
}

TEST_CASE("divisor root count for random surfaces") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const int g = 1 + trial % 5;
    Surface s = Surface::validate(random_focusing(rng, g));
    Divisor d = s.divisor_D0();
    CHECK(int(d.points.size()) == g);
    for (std::size_t i = 1; i < d.points.size(); ++i)
      CHECK(d.points[i - 1].z.real() > d.points[i].z.real());
    for (const SheetedPoint& p : d.points) {
      const cplx l2 = s.lambda_sq(p.z) * (p.sheet == Sheet::Main ? 1.0 : -1.0);
      CHECK(std::abs(l2 - 1.0) < 1e-7);
    }
  }
}

TEST_CASE("divisor symmetry for a left-right symmetric surface") {
  SurfaceSpec s4;
  s4.alphas = {{0.2, 1.0}, {0.1, 1.0}, {0.0, 1.0}, {-0.1, 1.0}, {-0.2, 1.0}};
  Surface s = Surface::validate(s4);
  Divisor d = s.divisor_D0();
  REQUIRE(d.points.size() == 4);
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(d.points[i].z.real() + d.points[3 - i].z.real()) < 1e-10);
}

TEST_CASE("defocusing mode basics") {
  SurfaceSpec spec;
  spec.mode = CutMode::Defocusing;
  spec.bands = {{0.0, 1.0}, {2.0, 2.5}};
  Surface s = Surface::validate(spec);
  CHECK(s.genus() == 1);
  CHECK(s.band_sum() == doctest::Approx(0.75));
  const cplx z = 1e6;
  CHECK(std::abs(s.eval_R({z, Sheet::Main}) / (z * z) - 1.0) < 1e-5);
  const cplx rp = s.eval_R_boundary(0, 0.1, CutSide::Plus);
  const cplx rm = s.eval_R_boundary(0, 0.1, CutSide::Minus);
  CHECK(std::abs(rp + rm) < 1e-12 * std::abs(rp));
  // Plus side of a left-to-right cut is above the real axis.
  const cplx z0 = s.cut_point(0, 0.1);
  CHECK(std::abs(s.eval_R({z0 + cplx(0, 1e-8), Sheet::Main}) - rp) < 1e-5 * std::abs(rp));
  Divisor d = s.divisor_D0();
  CHECK(d.points.size() == 1);
}

TEST_CASE("on-cut evaluation is rejected") {
  Surface s = Surface::validate(paper_g2());
  CHECK_THROWS_AS((void)s.eval_R({cplx(0.1, 1.0), Sheet::Main}), OnBranchCut);
  CHECK_THROWS_AS((void)s.eval_lambda(cplx(0.0, 0.25)), OnBranchCut);
}
