#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fgnls/surface.hpp"

namespace fgnls {

// Truncated lattice-sum evaluator for Theta(z; tau).  The enumerated point
// set is fixed at construction: every n with n^t (Im tau) n <= rho^2, where
// rho covers the worst reduced argument (Im part within half a lattice cell)
// so the omitted Gaussian tail stays below eps.
class ThetaContext {
 public:
  // extra_radius widens rho; used by the truncation-certificate test.
  ThetaContext(const Eigen::MatrixXcd& tau, double eps = 1e-12,
               double extra_radius = 0.0);

  int genus() const { return static_cast<int>(tau_.rows()); }
  const Eigen::MatrixXcd& tau() const { return tau_; }
  double eps() const { return eps_; }
  double rho() const { return rho_; }
  std::size_t lattice_size() const { return q_.size(); }

  cplx theta(const Eigen::VectorXcd& z) const;
  Eigen::VectorXcd theta_grad(const Eigen::VectorXcd& z) const;

  // z = z_reduced + tau*lambda with integer lambda = round(Y^{-1} Im z);
  // Theta(z) = exp(log_prefactor) * Theta(z_reduced) exactly.
  void theta_reduce(const Eigen::VectorXcd& z, Eigen::VectorXcd& z_reduced,
                    cplx& log_prefactor, Eigen::VectorXd* lambda = nullptr) const;

  // Lattice sum at an already-reduced argument, no prefactor.
  cplx theta_raw(const Eigen::VectorXcd& z) const;
  Eigen::VectorXcd theta_grad_raw(const Eigen::VectorXcd& z) const;

 private:
  Eigen::MatrixXcd tau_;
  Eigen::MatrixXd Y_;
  Eigen::MatrixXd Yinv_;
  double eps_ = 1e-12;
  double rho_ = 0.0;
  Eigen::MatrixXd pts_;      // one lattice point per row
  std::vector<cplx> q_;      // exp(i pi n^t tau n) per point
};

}  // namespace fgnls
