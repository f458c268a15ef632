#pragma once

#include <string>
#include <vector>

#include "fgnls/periods.hpp"
#include "fgnls/theta.hpp"

namespace fgnls {

// Real torus point, stored componentwise mod 1 in [0,1)^g.
class PhasePoint {
 public:
  PhasePoint() = default;
  explicit PhasePoint(Eigen::VectorXd omega) : v_(std::move(omega)) {
    for (Eigen::Index i = 0; i < v_.size(); ++i) v_(i) -= std::floor(v_(i));
  }
  static PhasePoint zero(int g) { return PhasePoint(Eigen::VectorXd::Zero(g)); }
  int size() const { return static_cast<int>(v_.size()); }
  const Eigen::VectorXd& value() const { return v_; }

 private:
  Eigen::VectorXd v_;
};

struct GridAxis {
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
};

// Row-major samples, last axis fastest.
struct FieldGrid {
  std::vector<GridAxis> axes;
  std::vector<cplx> samples;
  std::string meta;
};

class AmplitudeContext {
 public:
  AmplitudeContext(const Surface& surf, PeriodData pd, double theta_eps = 1e-12);

  const Surface& surface() const { return surf_; }
  const PeriodData& periods() const { return pd_; }
  const ThetaContext& theta_ctx() const { return th_; }
  const Eigen::VectorXcd& d_vector() const { return d_; }  // = -u_inf
  double band_sum() const { return band_sum_; }

  cplx f_value(const PhasePoint& omega) const;
  double f_abs(const PhasePoint& omega) const;
  cplx psi_value(double x, double t, const PhasePoint& omega0) const;

  // RHP solution Y = L^{-1}(inf) L(z); Y(inf) = identity.
  Eigen::Matrix2cd Y_matrix(cplx z, const PhasePoint& omega) const;
  // Same with an explicit d vector; negative-control hook for the tests.
  Eigen::Matrix2cd Y_matrix_with_d(cplx z, const PhasePoint& omega,
                                   const Eigen::VectorXcd& d) const;

  // Max over boundary samples on every cut of ||Y_plus - Y_minus J_j||.
  double jump_residual(const PhasePoint& omega, int samples_per_cut) const;
  double jump_residual_with_d(const PhasePoint& omega, int samples_per_cut,
                              const Eigen::VectorXcd& d) const;

  Eigen::Matrix2cd Y1_coefficient(const PhasePoint& omega) const;

 private:
  cplx theta_at(const Eigen::VectorXcd& z) const { return th_.theta(z); }

  Surface surf_;
  PeriodData pd_;
  ThetaContext th_;
  Eigen::VectorXcd d_;
  double band_sum_ = 0.0;
  cplx theta0_ = 0.0;      // Theta(0)
  cplx theta_2uinf_ = 0.0; // Theta(2 u_inf)
};

// |f| over a 2-plane slice of the torus: axes i_axis, j_axis swept over
// [0,1) with n points each, remaining components held at base.
FieldGrid f_grid(const AmplitudeContext& ctx, int i_axis, int j_axis, int n,
                 const Eigen::VectorXd& base, int threads = 0);

FieldGrid psi_grid(const AmplitudeContext& ctx, double x0, double x1, int nx,
                   double t0, double t1, int nt, const PhasePoint& omega0,
                   int threads = 0);

void write_field_csv(const FieldGrid& grid, std::ostream& out);
void write_field_json(const FieldGrid& grid, std::ostream& out);

}  // namespace fgnls
