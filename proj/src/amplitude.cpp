#include "fgnls/amplitude.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <thread>

#include "fgnls/errors.hpp"

namespace fgnls {

namespace {
constexpr cplx kI(0.0, 1.0);
constexpr double kBoundaryOffset = 1e-7;
}  // namespace

AmplitudeContext::AmplitudeContext(const Surface& surf, PeriodData pd,
                                   double theta_eps)
    : surf_(surf), pd_(std::move(pd)), th_(pd_.tau, theta_eps) {
  d_ = -pd_.u_inf;
  band_sum_ = surf_.band_sum();
  theta0_ = th_.theta(Eigen::VectorXcd::Zero(surf_.genus()));
  theta_2uinf_ = th_.theta(2.0 * pd_.u_inf);
  if (std::abs(theta_2uinf_) < 1e-10 * std::abs(theta0_))
    throw Error("Theta(2 u_inf) vanishes; period data is inconsistent");
}

cplx AmplitudeContext::f_value(const PhasePoint& omega) const {
  const Eigen::VectorXcd om = omega.value().cast<cplx>();
  const cplx den = th_.theta(om);
  if (std::abs(den) < 1e-10 * std::abs(theta0_))
    throw ThetaZeroDenominator("Theta(Omega) vanished on the real torus");
  return th_.theta(2.0 * pd_.u_inf + om) * theta0_ / (theta_2uinf_ * den);
}

double AmplitudeContext::f_abs(const PhasePoint& omega) const {
  return std::abs(f_value(omega));
}

cplx AmplitudeContext::psi_value(double x, double t,
                                 const PhasePoint& omega0) const {
  // Omega(x,t) = Omega0 + (V x + 2 W t)/(2 pi); the plane-wave gauge factor
  // exp(i(2 p_c x + 4 q_c t)) makes psi an exact NLS solution but leaves |psi|
  // untouched.
  const Eigen::VectorXd om =
      omega0.value() + (pd_.sk.V * x + 2.0 * pd_.sk.W * t) / (2.0 * M_PI);
  const cplx gauge = std::exp(
      kI * (2.0 * pd_.sk.p_const.real() * x + 4.0 * pd_.sk.q_const.real() * t));
  const double sign = surf_.mode() == CutMode::Focusing ? 1.0 : -1.0;
  return sign * f_value(PhasePoint(om)) * band_sum_ * gauge;
}

Eigen::Matrix2cd AmplitudeContext::Y_matrix_with_d(
    cplx z, const PhasePoint& omega, const Eigen::VectorXcd& d) const {
  const Eigen::VectorXcd u = abel_map(surf_, pd_.kappa, {z});
  const Eigen::VectorXcd om = omega.value().cast<cplx>();
  const cplx lam = surf_.eval_lambda(z);
  const cplx sum = lam + 1.0 / lam;
  const cplx dif = lam - 1.0 / lam;

  auto ratio = [&](const Eigen::VectorXcd& uu, const Eigen::VectorXcd& dd) {
    return th_.theta(uu - om + dd) / th_.theta(uu + dd);
  };
  Eigen::Matrix2cd L;
  L(0, 0) = 0.5 * sum * ratio(u, d);
  L(0, 1) = -0.5 * kI * dif * ratio(-u, d);
  L(1, 0) = 0.5 * kI * dif * ratio(u, -d);
  L(1, 1) = 0.5 * sum * ratio(-u, -d);

  const Eigen::VectorXcd ui = pd_.u_inf;
  Eigen::Matrix2cd Linf = Eigen::Matrix2cd::Zero();
  Linf(0, 0) = ratio(ui, d);
  Linf(1, 1) = ratio(-ui, -d);
  if (std::abs(Linf(0, 0)) < 1e-10 || std::abs(Linf(1, 1)) < 1e-10)
    throw SingularLInfinity("L(infinity) is numerically singular");
  Eigen::Matrix2cd Y;
  Y.row(0) = L.row(0) / Linf(0, 0);
  Y.row(1) = L.row(1) / Linf(1, 1);
  return Y;
}

Eigen::Matrix2cd AmplitudeContext::Y_matrix(cplx z, const PhasePoint& omega) const {
  return Y_matrix_with_d(z, omega, d_);
}

namespace {

Eigen::Matrix2cd jump_matrix(double omega_j) {
  // i sigma_2 exp(-2 pi i omega_j sigma_3)
  const cplx a = std::exp(cplx(0.0, -2.0 * M_PI * omega_j));
  Eigen::Matrix2cd J;
  J << 0.0, 1.0 / a, -a, 0.0;
  return J;
}

}  // namespace

double AmplitudeContext::jump_residual_with_d(const PhasePoint& omega,
                                              int samples_per_cut,
                                              const Eigen::VectorXcd& d) const {
  const int g = surf_.genus();
  double worst = 0.0;
  for (int j = 0; j <= g; ++j) {
    const double om_j = (j == 0) ? 0.0 : omega.value()(j - 1);
    const Eigen::Matrix2cd J = jump_matrix(om_j);
    // Offset toward the left of the cut orientation for the plus side:
    // upward cuts shift by -eps, real cuts shift by +i eps.
    const cplx off = surf_.mode() == CutMode::Focusing
                         ? cplx(-kBoundaryOffset, 0.0)
                         : cplx(0.0, kBoundaryOffset);
    for (int i = 0; i < samples_per_cut; ++i) {
      const double t = -0.95 + 1.9 * i / std::max(1, samples_per_cut - 1);
      const cplx zc = surf_.cut_point(j, t);
      // One Richardson step in the offset kills the O(eps) boundary error.
      auto side = [&](double sgn) {
        const Eigen::Matrix2cd y1 = Y_matrix_with_d(zc + sgn * off, omega, d);
        const Eigen::Matrix2cd y2 = Y_matrix_with_d(zc + 2.0 * sgn * off, omega, d);
        return (2.0 * y1 - y2).eval();
      };
      const Eigen::Matrix2cd r = side(+1.0) - side(-1.0) * J;
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double AmplitudeContext::jump_residual(const PhasePoint& omega,
                                       int samples_per_cut) const {
  return jump_residual_with_d(omega, samples_per_cut, d_);
}

Eigen::Matrix2cd AmplitudeContext::Y1_coefficient(const PhasePoint& omega) const {
  auto circle_avg = [&](double radius) {
    Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
    const int n = 16;
    for (int k = 0; k < n; ++k) {
      const cplx z = radius * std::polar(1.0, 2.0 * M_PI * (k + 0.5) / n);
      acc += z * (Y_matrix(z, omega) - Eigen::Matrix2cd::Identity());
    }
    return (acc / static_cast<double>(n)).eval();
  };
  const double r1 = 1e3, r2 = 5e2;
  const Eigen::Matrix2cd m1 = circle_avg(r1);
  const Eigen::Matrix2cd m2 = circle_avg(r2);
  if ((m1 - m2).cwiseAbs().maxCoeff() > 1e-3 * (1.0 + m1.cwiseAbs().maxCoeff()))
    throw FitNonConvergence("far-field circle averages disagree");
  return m1 + (m1 - m2) / (std::pow(r1 / r2, 16.0) - 1.0);
}

namespace {

// Evaluate sampler over the row-major index space of the axes in parallel.
void fill_grid(FieldGrid& grid,
               const std::function<cplx(const std::vector<double>&)>& sampler,
               int threads) {
  std::size_t total = 1;
  for (const GridAxis& ax : grid.axes) total *= static_cast<std::size_t>(ax.count);
  grid.samples.assign(total, 0.0);
  if (threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw ? static_cast<int>(hw) : 4;
  }
  threads = std::min<std::size_t>(threads, total ? total : 1);

  auto coord = [&](std::size_t flat, std::vector<double>& x) {
    for (std::size_t a = grid.axes.size(); a-- > 0;) {
      const GridAxis& ax = grid.axes[a];
      const std::size_t i = flat % static_cast<std::size_t>(ax.count);
      flat /= static_cast<std::size_t>(ax.count);
      x[a] = ax.count > 1
                 ? ax.start + (ax.stop - ax.start) * static_cast<double>(i) /
                       (ax.count - 1)
                 : ax.start;
    }
  };

  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      std::vector<double> x(grid.axes.size());
      for (std::size_t flat = static_cast<std::size_t>(w); flat < total;
           flat += static_cast<std::size_t>(threads)) {
        coord(flat, x);
        grid.samples[flat] = sampler(x);
      }
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace

FieldGrid f_grid(const AmplitudeContext& ctx, int i_axis, int j_axis, int n,
                 const Eigen::VectorXd& base, int threads) {
  const int g = ctx.surface().genus();
  FieldGrid grid;
  grid.axes = {{"omega" + std::to_string(i_axis + 1), 0.0, 1.0 - 1.0 / n, n},
               {"omega" + std::to_string(j_axis + 1), 0.0, 1.0 - 1.0 / n, n}};
  fill_grid(
      grid,
      [&](const std::vector<double>& x) {
        Eigen::VectorXd om =
            base.size() == g ? base : Eigen::VectorXd::Zero(g).eval();
        om(i_axis) = x[0];
        om(j_axis) = x[1];
        return ctx.f_value(PhasePoint(om));
      },
      threads);
  return grid;
}

FieldGrid psi_grid(const AmplitudeContext& ctx, double x0, double x1, int nx,
                   double t0, double t1, int nt, const PhasePoint& omega0,
                   int threads) {
  FieldGrid grid;
  grid.axes = {{"x", x0, x1, nx}, {"t", t0, t1, nt}};
  fill_grid(
      grid,
      [&](const std::vector<double>& x) {
        return ctx.psi_value(x[0], x[1], omega0);
      },
      threads);
  return grid;
}

void write_field_csv(const FieldGrid& grid, std::ostream& out) {
  out << "# axes: ";
  for (std::size_t a = 0; a < grid.axes.size(); ++a) {
    const GridAxis& ax = grid.axes[a];
    out << (a ? "," : "") << ax.name << "=" << ax.start << ":" << ax.stop << ":"
        << ax.count;
  }
  out << "\n";
  for (const GridAxis& ax : grid.axes) out << ax.name << ",";
  out << "re,im,abs\n";
  std::vector<double> x(grid.axes.size());
  for (std::size_t flat = 0; flat < grid.samples.size(); ++flat) {
    std::size_t rem = flat;
    for (std::size_t a = grid.axes.size(); a-- > 0;) {
      const GridAxis& ax = grid.axes[a];
      const std::size_t i = rem % static_cast<std::size_t>(ax.count);
      rem /= static_cast<std::size_t>(ax.count);
      x[a] = ax.count > 1 ? ax.start + (ax.stop - ax.start) *
                                           static_cast<double>(i) / (ax.count - 1)
                          : ax.start;
    }
    for (double xi : x) out << xi << ",";
    const cplx v = grid.samples[flat];
    out << v.real() << "," << v.imag() << "," << std::abs(v) << "\n";
  }
}

void write_field_json(const FieldGrid& grid, std::ostream& out) {
  out << "{\"axes\":[";
  for (std::size_t a = 0; a < grid.axes.size(); ++a) {
    const GridAxis& ax = grid.axes[a];
    out << (a ? "," : "") << "{\"name\":\"" << ax.name << "\",\"start\":"
        << ax.start << ",\"stop\":" << ax.stop << ",\"count\":" << ax.count
        << "}";
  }
  out << "],\"samples\":[";
  for (std::size_t i = 0; i < grid.samples.size(); ++i)
    out << (i ? "," : "") << "[" << grid.samples[i].real() << ","
        << grid.samples[i].imag() << "]";
  out << "]";
  if (!grid.meta.empty()) out << ",\"meta\":" << grid.meta;
  out << "}\n";
}

}  // namespace fgnls
