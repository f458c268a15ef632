#pragma once

#include <Eigen/Dense>

#include "fgnls/quadrature.hpp"
#include "fgnls/surface.hpp"

namespace fgnls {

// Second-kind differentials dp = P_p/R dz, dq = P_q/R dz with poles only at
// the two points over infinity, zero A-periods, and principal parts matching
// dp ~ +-dz, dq ~ +-2z dz.  V, W are their B-period vectors (real by Schwarz
// symmetry); p_const, q_const the constants in p ~ z + p_const,
// q ~ z^2 + q_const at infinity on the main sheet.
struct SecondKind {
  Poly dp_num;
  Poly dq_num;
  Eigen::VectorXcd V_raw;
  Eigen::VectorXcd W_raw;
  Eigen::VectorXd V;
  Eigen::VectorXd W;
  cplx p_const = 0.0;
  cplx q_const = 0.0;
};

struct PeriodData {
  Surface surface;
  Eigen::MatrixXcd A;        // A-cycle matrix of monomials z^{g-k}/R
  Eigen::MatrixXcd kappa;    // A^{-1}; column j holds the coefficients of p_j
  Eigen::MatrixXcd tau;      // B-periods of the normalized differentials
  Eigen::VectorXcd u_inf;    // Abel map of infinity on the main sheet
  Eigen::VectorXcd riemann_k;
  SecondKind sk;
  cplx base_point = 0.0;
  double cond_A = 0.0;
};

Eigen::MatrixXcd a_matrix(const Surface& surf, const QuadratureOptions& opt = {});

// kappa = A^{-1}; condition number reported through *cond if given.
Eigen::MatrixXcd normalized_differentials(const Surface& surf,
                                          const Eigen::MatrixXcd& A,
                                          double* cond = nullptr);

// One-way main-sheet leg of the B_j cycle: from the beginning of cut 0 to
// the beginning of cut j via a detour below (defocusing: under) all cuts.
// The closed cycle doubles it through the second sheet.
SheetPath b_path(const Surface& surf, int j);

Eigen::MatrixXcd period_matrix(const Surface& surf, const Eigen::MatrixXcd& kappa,
                               const QuadratureOptions& opt = {});

// Canonical main-sheet path from the base point (begin of cut 0) to z.
SheetPath abel_path(const Surface& surf, cplx z);

Eigen::VectorXcd abel_map(const Surface& surf, const Eigen::MatrixXcd& kappa,
                          const SheetedPoint& p, const QuadratureOptions& opt = {});

Eigen::VectorXcd u_infinity(const Surface& surf, const Eigen::MatrixXcd& kappa,
                            const QuadratureOptions& opt = {});

Eigen::VectorXcd riemann_constants(const Surface& surf, const Eigen::MatrixXcd& kappa,
                                   const QuadratureOptions& opt = {});

SecondKind second_kind_periods(const Surface& surf, const QuadratureOptions& opt = {});

PeriodData build_period_data(const Surface& surf, const QuadratureOptions& opt = {});

// Coefficients (ascending) of 1/sqrt(prod (1 - end_j u)(1 - begin_j u)) up to
// order n; the series of z^{g+1}/R(z) in u = 1/z on the main sheet.
std::vector<cplx> inverse_R_series(const Surface& surf, int n);

// Nearest lattice representative: returns z - mu - tau*lambda with integer
// vectors chosen from Im tau; optionally reports lambda.
Eigen::VectorXcd lattice_reduce_vector(const Eigen::MatrixXcd& tau,
                                       const Eigen::VectorXcd& z,
                                       Eigen::VectorXd* lambda_out = nullptr,
                                       Eigen::VectorXd* mu_out = nullptr);

// a == b modulo Z^g + tau Z^g within tol.
bool lattice_equal(const Eigen::MatrixXcd& tau, const Eigen::VectorXcd& a,
                   const Eigen::VectorXcd& b, double tol);

}  // namespace fgnls
