#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "fgnls/errors.hpp"

namespace fgnls {

using cplx = std::complex<double>;

enum class CutMode { Focusing, Defocusing };
enum class Sheet { Main, Second };

// Side of a cut relative to its orientation: Plus is the left side when
// walking from the begin point towards the end point.
enum class CutSide { Plus, Minus };

struct SheetedPoint {
  cplx z;
  Sheet sheet = Sheet::Main;
};

// One branch cut [begin, end].  Focusing: begin = conj(alpha_j), end = alpha_j
// (vertical, oriented upward).  Defocusing: begin = beta_j, end = alpha_j
// (real, oriented left to right).
struct Cut {
  cplx begin;
  cplx end;
  cplx center;  // (begin + end) / 2
  cplx half;    // (end - begin) / 2
  double band_half_length;  // b_j
};

struct Divisor {
  std::vector<SheetedPoint> points;
};

struct SurfaceSpec {
  CutMode mode = CutMode::Focusing;
  std::vector<cplx> alphas;                       // focusing endpoints a_j + i b_j
  std::vector<std::pair<double, double>> bands;   // defocusing (beta_j, alpha_j)
};

// A validated hyperelliptic surface with g+1 non-intersecting branch cuts.
// Immutable; all evaluators are pure.
class Surface {
 public:
  static Surface validate(const SurfaceSpec& spec);

  CutMode mode() const { return mode_; }
  int genus() const { return static_cast<int>(cuts_.size()) - 1; }
  const std::vector<Cut>& cuts() const { return cuts_; }
  const std::vector<double>& band_lengths() const { return band_; }
  double band_sum() const { return band_sum_; }

  // Point on cut j at parameter t in [-1, 1].
  cplx cut_point(int j, double t) const;

  // Distance from z to the nearest cut segment.
  double cut_distance(cplx z) const;
  bool near_cut(cplx z, double tol = 1e-12) const;

  // R(z) = sqrt(prod (z - end_j)(z - begin_j)), branch cuts on the cuts,
  // normalized so that R(z)/z^{g+1} -> 1 on the main sheet.
  cplx eval_R(const SheetedPoint& p) const;

  // R on the main sheet without the on-cut guard, for integration kernels
  // whose path geometry already guarantees the point is off the cuts.
  cplx eval_R_unguarded(cplx z) const;

  // One-sided boundary value of R at cut_point(j, t).
  cplx eval_R_boundary(int j, double t, CutSide side,
                       Sheet sheet = Sheet::Main) const;

  // prod_{k != j} s_k evaluated at cut_point(j, t) on the main sheet, i.e.
  // R with the singular local pair of cut j divided out.
  cplx reduced_R(int j, double t) const;

  // lambda(z) = (prod (z - end_j)/(z - begin_j))^{1/4}, branch cuts on the
  // cuts, lambda -> 1 at infinity.
  cplx eval_lambda(cplx z) const;
  cplx lambda_boundary(int j, double t, CutSide side) const;

  // lambda^2 with the same branch structure (main sheet).
  cplx lambda_sq(cplx z) const;

  // Coefficients (ascending) of prod (z - end_j) - prod (z - begin_j),
  // the degree-g numerator of lambda^4 - 1.
  std::vector<cplx> lambda_numerator_poly() const;

  // The g real zeros of lambda^2 -+ 1 on the surface, sorted decreasing,
  // sheets assigned by the sign of lambda^2.
  Divisor divisor_D0() const;

 private:
  Surface() = default;

  // Local factor s_j(z) with branch cut exactly on cut j, s_j ~ z at infinity.
  cplx cut_factor(int j, cplx z) const;
  // Local quartic-root factor ((z - end_j)/(z - begin_j))^{1/4}, -> 1 at inf.
  cplx quartic_factor(int j, cplx z) const;

  CutMode mode_ = CutMode::Focusing;
  std::vector<Cut> cuts_;
  std::vector<double> band_;
  double band_sum_ = 0.0;
};

}  // namespace fgnls
