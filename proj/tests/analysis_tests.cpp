#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"

#include "fgnls/analysis.hpp"

using namespace fgnls;

namespace {

Surface paper_g2() {
  SurfaceSpec spec;
  spec.alphas = {{0.1, 2.0}, {0.0, 0.5}, {-0.1, 1.0}};
  return Surface::validate(spec);
}

AmplitudeContext make_ctx(const Surface& s) {
  return AmplitudeContext(s, build_period_data(s));
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("torus extrema on the three-cut surface") {
  const AmplitudeContext ctx = make_ctx(paper_g2());
  const ExtremaReport rep = torus_extrema(ctx, 10, 3);

  CHECK(std::abs(rep.max_value - 1.0) < 1e-6);
  CHECK(rep.max_value <= 1.0 + 1e-6);
  for (int i = 0; i < 2; ++i) {
    const double d = std::min(rep.argmax(i), 1.0 - rep.argmax(i));
    CHECK(d < 1e-4);
  }
  CHECK(std::abs(rep.min_value - 1.0 / 7.0) < 1e-5);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(rep.argmin(i) - 0.5) < 1e-4);

  REQUIRE(rep.table.size() == 4);
  for (const HalfPeriodRow& row : rep.table) {
    CHECK(row.discrepancy < 1e-7);
    REQUIRE(row.grad_norm.has_value());
    CHECK(*row.grad_norm < 1e-5);
  }
}

TEST_CASE("extrema are invariant under cut relabeling") {
  const AmplitudeContext a = make_ctx(paper_g2());
  SurfaceSpec spec;
  spec.alphas = {{-0.1, 1.0}, {0.1, 2.0}, {0.0, 0.5}};
  const AmplitudeContext b = make_ctx(Surface::validate(spec));
  const ExtremaReport ra = torus_extrema(a, 8, 3);
  const ExtremaReport rb = torus_extrema(b, 8, 3);
  CHECK(std::abs(ra.max_value - rb.max_value) < 1e-6);
  CHECK(std::abs(ra.min_value - rb.min_value) < 1e-6);
}

TEST_CASE("half-period table on a random genus-3 surface") {
  SurfaceSpec spec;
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(0.4, 1.6);
  spec.alphas = {{0.9, u(rng)}, {0.3, u(rng)}, {-0.3, u(rng)}, {-0.9, u(rng)}};
  const Surface s = Surface::validate(spec);
  const AmplitudeContext ctx = make_ctx(s);
  const auto table = half_period_table(ctx);
  REQUIRE(table.size() == 8);
  CHECK(std::abs(table[0].measured - 1.0) < 1e-10);  // h = 0 row
  CHECK(table[0].predicted == 1.0);
  for (const HalfPeriodRow& row : table) CHECK(row.discrepancy < 1e-7);
}

TEST_CASE("criticality: half-periods critical, generic points not") {
  const AmplitudeContext ctx = make_ctx(paper_g2());
  const auto g0 = criticality_check(ctx, PhasePoint::zero(2));
  REQUIRE(g0.has_value());
  CHECK(*g0 < 1e-5);

  Eigen::VectorXd om(2);
  om << 0.23, 0.68;
  const auto gen = criticality_check(ctx, PhasePoint(om));
  REQUIRE(gen.has_value());
  CHECK(*gen > 1e-3);

  // equal band heights make f vanish at the half-period: gradient skipped
  SurfaceSpec spec;
  spec.alphas = {{0.5, 1.0}, {-0.5, 1.0}};
  const AmplitudeContext eq = make_ctx(Surface::validate(spec));
  Eigen::VectorXd h(1);
  h << 0.5;
  CHECK(!criticality_check(eq, PhasePoint(h)).has_value());
  const auto table = half_period_table(eq);
  CHECK(table[1].note == "zero critical value, gradient check skipped");
}

TEST_CASE("divisor zeros of the theta factors") {
  for (bool focusing : {true, false}) {
    SurfaceSpec spec;
    if (focusing) {
      spec.alphas = {{0.1, 2.0}, {0.0, 0.5}, {-0.1, 1.0}};
    } else {
      spec.mode = CutMode::Defocusing;
      spec.bands = {{0.0, 1.0}, {2.0, 2.5}, {4.0, 5.0}};
    }
    const AmplitudeContext ctx = make_ctx(Surface::validate(spec));
    const DivisorReport rep = divisor_check(ctx);
    CHECK(rep.residual < 1e-5);
    CHECK(rep.involuted_residual < 1e-5);

    const DivisorReport bad = divisor_check_perturbed(ctx, 1e-2);
    CHECK(bad.residual > 1e-3);
  }
}

TEST_CASE("degeneration sweep shrinks every cut but the first") {
  const DegenerationCurve curve =
      degeneration_sweep(paper_g2(), {1.0, 1e-1, 1e-2, 1e-3});
  REQUIRE(curve.points.size() == 4);
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    CHECK(curve.points[i].sup_f_dev > curve.points[i + 1].sup_f_dev);
    CHECK(curve.points[i].lambda_min < curve.points[i + 1].lambda_min);
  }
  CHECK(curve.points.back().sup_f_dev < 0.05);

  // tau(xi) ~ diag ln xi: lambda_min grows roughly like |ln xi|
  const double slope =
      (curve.points[3].lambda_min - curve.points[2].lambda_min) / std::log(10.0);
  CHECK(slope > 0.0);
}

TEST_CASE("defocusing amplitude bounds") {
  SurfaceSpec spec;
  spec.mode = CutMode::Defocusing;
  spec.bands = {{0.0, 1.0}, {2.0, 2.5}};
  const Surface s = Surface::validate(spec);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd om(1);
  om << u(rng);
  const DefocusingBoundReport rep =
      dnls_bound_check(s, 25, 15, {PhasePoint::zero(1), PhasePoint(om)});
  CHECK(rep.upper_bound == doctest::Approx(0.75));
  CHECK(rep.dominant);
  CHECK(rep.lower_bound == doctest::Approx(0.25));
  CHECK(rep.max_abs <= 0.75 + 1e-6);
  CHECK(rep.min_abs >= 0.25 - 1e-6);
  CHECK(std::abs(rep.origin_abs - 0.75) < 1e-6);
  CHECK(rep.pass);
}

TEST_CASE("gap identity for real band layouts") {
  const KdvBound b = kdv_bound_identity({{0.0, 1.0}, {2.0, 3.0}, {5.0, kInf}});
  CHECK(b.bound == doctest::Approx(3.0));
  REQUIRE(b.gap_terms.size() == 2);
  CHECK(b.gap_terms[0] == doctest::Approx(1.0));
  CHECK(b.gap_terms[1] == doctest::Approx(2.0));

  CHECK(kdv_bound_identity({{0.0, 1.0}, {4.0, kInf}}).bound ==
        doctest::Approx(3.0));
  CHECK(kdv_bound_identity({{0.0, 1.0}, {1.0, kInf}}).bound ==
        doctest::Approx(0.0));
  CHECK_THROWS_AS(kdv_bound_identity({{2.0, 1.0}, {3.0, kInf}}),
                  OrderingViolation);
  CHECK_THROWS_AS(kdv_bound_identity({{0.0, 1.0}, {2.0, 3.0}}),
                  OrderingViolation);
}

TEST_CASE("pde residual converges at second order") {
  SurfaceSpec spec;
  spec.alphas = {{0.4, 1.0}, {-0.4, 0.7}};
  const AmplitudeContext ctx = make_ctx(Surface::validate(spec));
  const PhasePoint om0 = PhasePoint::zero(1);

  const double r64 = nls_residual(ctx, -0.5, 0.5, -0.25, 0.25, 64, om0);
  const double r128 = nls_residual(ctx, -0.5, 0.5, -0.25, 0.25, 128, om0);
  CHECK(r64 / r128 > 3.5);
  CHECK(r64 / r128 < 4.5);

  const double r256 = nls_residual(ctx, -0.5, 0.5, -0.25, 0.25, 256, om0);
  CHECK(r256 < 1e-3);

  // wrong nonlinearity sign cannot cancel
  const double bad = nls_residual(ctx, -0.5, 0.5, -0.25, 0.25, 64, om0, -1);
  CHECK(bad > 1.0);
}

TEST_CASE("certification report") {
  std::ostringstream out;
  CHECK(run_check(paper_g2(), out));
  const auto doc = nlohmann::json::parse(out.str());
  CHECK(doc["pass"] == true);
  CHECK(doc["mode"] == "focusing");
  bool saw_min = false;
  for (const auto& c : doc["checks"]) {
    CHECK(c["pass"] == true);
    if (c["name"] == "torus_min_formula") saw_min = true;
  }
  CHECK(saw_min);

  // corrupted period matrix must be caught, not silently accepted
  const Surface s = paper_g2();
  PeriodData pd = build_period_data(s);
  pd.tau(0, 0) += cplx(0.0, 0.3);
  pd.tau(1, 1) += cplx(0.0, 0.2);
  std::ostringstream bad;
  CHECK(!run_check(AmplitudeContext(s, pd), bad));
  CHECK(nlohmann::json::parse(bad.str())["pass"] == false);

  std::ostringstream dout;
  SurfaceSpec dspec;
  dspec.mode = CutMode::Defocusing;
  dspec.bands = {{0.0, 1.0}, {2.0, 2.5}};
  CHECK(run_check(Surface::validate(dspec), dout));
  CHECK(nlohmann::json::parse(dout.str())["mode"] == "defocusing");
}
