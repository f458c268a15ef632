#pragma once

#include <functional>
#include <vector>

#include "fgnls/surface.hpp"

namespace fgnls {

// Polynomial with ascending coefficients: p[0] + p[1] z + ...
using Poly = std::vector<cplx>;

cplx poly_eval(const Poly& p, cplx z);

enum class Orientation { Positive, Negative };

// Loop once around cut `index`; Positive is counterclockwise.
struct CutLoop {
  int index = 0;
  Orientation orientation = Orientation::Positive;
};

// Straight segment from a to b.  sheet_sign multiplies 1/R (use -1 for the
// second sheet).  singular_a/b flag endpoints that are branch points, where
// 1/R has an integrable inverse-square-root singularity.
struct PathSegment {
  cplx a;
  cplx b;
  double sheet_sign = 1.0;
  bool singular_a = false;
  bool singular_b = false;
};

struct SheetPath {
  std::vector<PathSegment> segments;
};

struct QuadratureOptions {
  double tol = 1e-10;
  int start_n = 64;
  int max_n = 4096;
};

// Integral of numerator(z)/R(z) once around the cut.  The loop is collapsed
// onto the cut; Gauss-Chebyshev nodes absorb both endpoint singularities.
cplx loop_integral(const Surface& surf, CutLoop loop, const Poly& numerator,
                   const QuadratureOptions& opt = {});

// Integral of numerator(z)/R(z) along the path on the annotated sheets.
// Segments must not cross cut interiors.
cplx path_integral(const Surface& surf, const SheetPath& path,
                   const Poly& numerator, const QuadratureOptions& opt = {});

// Building blocks, exposed for direct testing.
// Integral of f(t)/sqrt(1-t^2) over [-1,1] with an n-point Chebyshev rule.
cplx gauss_chebyshev(const std::function<cplx(double)>& f, int n);
// Integral of f over [0,1] with an n-point Legendre rule.
cplx gauss_legendre01(const std::function<cplx(double)>& f, int n);
// Nodes/weights of the n-point Gauss-Legendre rule on [0,1] (cached).
const std::pair<std::vector<double>, std::vector<double>>& legendre_rule01(int n);

// Throws PathCrossesCut if any segment meets a cut interior away from its
// declared singular endpoints.
void check_path(const Surface& surf, const SheetPath& path);

}  // namespace fgnls
