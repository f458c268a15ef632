#include "fgnls/theta.hpp"

#include <cmath>

#include "fgnls/errors.hpp"

namespace fgnls {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
constexpr std::size_t kPointCap = 10'000'000;
}  // namespace

ThetaContext::ThetaContext(const Eigen::MatrixXcd& tau, double eps,
                           double extra_radius)
    : tau_(tau), eps_(eps) {
  const int g = static_cast<int>(tau.rows());
  if (g < 1 || tau.cols() != g) throw Error("period matrix must be square");
  if ((tau - tau.transpose()).cwiseAbs().maxCoeff() >
      1e-8 * std::max(1.0, tau.cwiseAbs().maxCoeff()))
    throw Error("period matrix must be symmetric");
  Y_ = tau.imag();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Y_);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (lmin <= 0.0) throw Error("Im tau must be positive definite");
  Yinv_ = es.operatorInverseSqrt() * es.operatorInverseSqrt();

  // Worst-case reduced center satisfies |Y^{-1} Im z| <= 1/2 per component,
  // so its Y-norm is at most sqrt(lmax * g)/2.  The 10^3 factor absorbs the
  // number of boundary lattice points in the tail bound.
  rho_ = std::sqrt(std::log(1e3 / eps) / M_PI) + 0.5 * std::sqrt(lmax * g) +
         extra_radius;
  const double rho2 = rho_ * rho_;

  std::vector<int> box(static_cast<std::size_t>(g));
  double count = 1.0;
  for (int i = 0; i < g; ++i) {
    box[static_cast<std::size_t>(i)] =
        static_cast<int>(std::floor(rho_ * std::sqrt(Yinv_(i, i)))) + 1;
    count *= 2.0 * box[static_cast<std::size_t>(i)] + 1.0;
    if (count > static_cast<double>(kPointCap))
      throw TruncationOverflow("theta lattice exceeds the point cap");
  }

  std::vector<Eigen::VectorXd> kept;
  Eigen::VectorXd n = Eigen::VectorXd::Zero(g);
  // Odometer enumeration of the box with the exact ellipsoid test.
  std::vector<int> idx(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) idx[static_cast<std::size_t>(i)] = -box[static_cast<std::size_t>(i)];
  while (true) {
    for (int i = 0; i < g; ++i) n(i) = idx[static_cast<std::size_t>(i)];
    if (n.dot(Y_ * n) <= rho2) {
      kept.push_back(n);
      if (kept.size() > kPointCap)
        throw TruncationOverflow("theta lattice exceeds the point cap");
    }
    int i = 0;
    for (; i < g; ++i) {
      if (++idx[static_cast<std::size_t>(i)] <= box[static_cast<std::size_t>(i)]) break;
      idx[static_cast<std::size_t>(i)] = -box[static_cast<std::size_t>(i)];
    }
    if (i == g) break;
  }

  pts_.resize(static_cast<Eigen::Index>(kept.size()), g);
  q_.resize(kept.size());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    pts_.row(static_cast<Eigen::Index>(r)) = kept[r];
    const Eigen::VectorXcd nc = kept[r].cast<cplx>();
    q_[r] = std::exp(cplx(0.0, M_PI) * nc.dot(tau_ * nc));
  }
}

void ThetaContext::theta_reduce(const Eigen::VectorXcd& z,
                                Eigen::VectorXcd& z_reduced, cplx& log_prefactor,
                                Eigen::VectorXd* lambda) const {
  const Eigen::VectorXd lam = (Yinv_ * z.imag()).array().round();
  z_reduced = z - tau_ * lam.cast<cplx>();
  const Eigen::VectorXcd lc = lam.cast<cplx>();
  log_prefactor = cplx(0.0, -kTwoPi) * lc.dot(z_reduced) +
                  cplx(0.0, -M_PI) * lc.dot(tau_ * lc);
  if (lambda) *lambda = lam;
}

cplx ThetaContext::theta_raw(const Eigen::VectorXcd& z) const {
  const Eigen::VectorXcd w = cplx(0.0, kTwoPi) * z;
  cplx acc = 0.0;
  for (std::size_t r = 0; r < q_.size(); ++r) {
    cplx e = 0.0;
    for (int i = 0; i < pts_.cols(); ++i)
      e += pts_(static_cast<Eigen::Index>(r), i) * w(i);
    acc += q_[r] * std::exp(e);
  }
  return acc;
}

Eigen::VectorXcd ThetaContext::theta_grad_raw(const Eigen::VectorXcd& z) const {
  const Eigen::VectorXcd w = cplx(0.0, kTwoPi) * z;
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(pts_.cols());
  for (std::size_t r = 0; r < q_.size(); ++r) {
    cplx e = 0.0;
    for (int i = 0; i < pts_.cols(); ++i)
      e += pts_(static_cast<Eigen::Index>(r), i) * w(i);
    const cplx t = q_[r] * std::exp(e) * cplx(0.0, kTwoPi);
    for (int i = 0; i < pts_.cols(); ++i)
      acc(i) += t * pts_(static_cast<Eigen::Index>(r), i);
  }
  return acc;
}

cplx ThetaContext::theta(const Eigen::VectorXcd& z) const {
  Eigen::VectorXcd zr;
  cplx lp;
  theta_reduce(z, zr, lp);
  return std::exp(lp) * theta_raw(zr);
}

Eigen::VectorXcd ThetaContext::theta_grad(const Eigen::VectorXcd& z) const {
  Eigen::VectorXcd zr;
  cplx lp;
  Eigen::VectorXd lam;
  theta_reduce(z, zr, lp, &lam);
  const cplx pref = std::exp(lp);
  // d/dz of exp(-2 pi i lam.z_r - i pi lam.tau.lam) Theta(z_r), z_r = z - tau lam.
  return pref * (theta_grad_raw(zr) -
                 cplx(0.0, kTwoPi) * theta_raw(zr) * lam.cast<cplx>());
}

}  // namespace fgnls
