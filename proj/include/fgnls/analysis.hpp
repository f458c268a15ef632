#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fgnls/amplitude.hpp"

namespace fgnls {

struct HalfPeriodRow {
  Eigen::VectorXd h;
  cplx measured;
  double predicted = 0.0;      // from the band lengths alone
  double discrepancy = 0.0;
  std::optional<double> grad_norm;  // empty: zero critical value, skipped
  std::string note;
};

struct ExtremaReport {
  double max_value = 0.0;
  Eigen::VectorXd argmax;
  double min_value = 0.0;
  Eigen::VectorXd argmin;
  int grid_per_dim = 0;
  int refine_steps = 0;
  std::vector<HalfPeriodRow> table;
};

struct DegenerationPoint {
  double xi = 0.0;
  double sup_f_dev = 0.0;     // sup over the Omega sample set of |f - 1|
  double lambda_min = 0.0;    // smallest eigenvalue of Im tau(xi)
};

struct DegenerationCurve {
  std::vector<DegenerationPoint> points;
};

struct DivisorReport {
  double residual = 0.0;            // max_j |Theta(u(z_j) + u_inf)| / scale
  double involuted_residual = 0.0;  // max_j |Theta(u(z_j^hat) - u_inf)| / scale
  double scale = 0.0;               // |Theta(0)|
};

struct DefocusingBoundReport {
  double upper_bound = 0.0;   // half the total band length
  double lower_bound = 0.0;   // dominant-band bound, 0 if no band dominates
  bool dominant = false;
  double max_abs = 0.0;
  double min_abs = 0.0;
  double origin_abs = 0.0;    // |psi(0,0)| at Omega0 = 0
  bool pass = false;
};

struct KdvBound {
  double bound = 0.0;               // (beta_g - beta_0) - sum of band widths
  std::vector<double> gap_terms;    // beta_{j+1} - alpha_j
};

ExtremaReport torus_extrema(const AmplitudeContext& ctx, int grid_per_dim,
                            int refine_steps);

std::vector<HalfPeriodRow> half_period_table(const AmplitudeContext& ctx);

// ||grad |f|(h)|| by central differences with one Richardson step; empty when
// f(h) = 0 (the gradient of |f| is defined only as a limit there).
std::optional<double> criticality_check(const AmplitudeContext& ctx,
                                        const PhasePoint& h);

DivisorReport divisor_check(const AmplitudeContext& ctx);
// Same residuals after moving one divisor point; sensitivity control.
DivisorReport divisor_check_perturbed(const AmplitudeContext& ctx,
                                      double shift);

// Rebuilds the surface with alpha_j(xi) = a_j + i xi b_j for j >= 1 (cut 0
// fixed) and recomputes periods from scratch at every xi.
DegenerationCurve degeneration_sweep(const Surface& base,
                                     const std::vector<double>& xi_list);

DefocusingBoundReport dnls_bound_check(const Surface& surf, int nx, int nt,
                                       const std::vector<PhasePoint>& omega0s);

// Pure arithmetic on the band layout beta_0 < alpha_0 < ... < beta_g; the
// last pair is (beta_g, inf) and only its left endpoint enters.
KdvBound kdv_bound_identity(const std::vector<std::pair<double, double>>& bands);

// Max interior centered-difference residual of i psi_t + psi_xx +- 2|psi|^2 psi
// on an n x n grid.  nonlin_sign 0 picks the sign from the surface mode;
// +-1 forces it (negative control).
double nls_residual(const AmplitudeContext& ctx, double x0, double x1,
                    double t0, double t1, int n, const PhasePoint& omega0,
                    int nonlin_sign = 0);

// Full certification suite; writes a JSON report with one pass/fail entry per
// invariant and returns the overall verdict.
bool run_check(const AmplitudeContext& ctx, std::ostream& out,
               int grid_per_dim = 8, int refine_steps = 3);
bool run_check(const Surface& surf, std::ostream& out, int grid_per_dim = 8,
               int refine_steps = 3);

}  // namespace fgnls
