#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>

// Damped least squares (Levenberg-Marquardt with Marquardt diagonal scaling).
// Deterministic given the initial point; finite-difference Jacobian fallback
// when no analytic Jacobian is supplied.

namespace hyperspec {

struct LevMarOptions {
  int max_iterations = 200;
  double ftol = 1e-15;           // relative cost-reduction stop
  double xtol = 1e-14;           // relative step-size stop
  double gtol = 1e-12;           // gradient inf-norm stop
  double lambda0 = 1e-3;         // initial damping
  double lambda_max = 1e12;
  double fd_step = 1e-6;         // relative finite-difference step
  bool central_difference = true;
  Eigen::VectorXd scales;        // per-parameter typical magnitudes (optional)
};

struct LevMarResult {
  Eigen::VectorXd params;
  Eigen::VectorXd residuals;
  double cost = 0.0;             // sum of squared residuals
  Eigen::MatrixXd covariance;    // sigma^2 (J^T J)^-1 at the optimum
  int iterations = 0;
  bool converged = false;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

namespace levmar_detail {

inline Eigen::MatrixXd fd_jacobian(const ResidualFn& f, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& r0, const LevMarOptions& opt) {
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(r0.size());
  Eigen::MatrixXd j(m, n);
  for (int k = 0; k < n; ++k) {
    const double scale =
        opt.scales.size() == n ? std::max(std::abs(x(k)), opt.scales(k)) : std::max(std::abs(x(k)), 1.0);
    const double h = opt.fd_step * scale;
    Eigen::VectorXd xp = x;
    xp(k) += h;
    if (opt.central_difference) {
      Eigen::VectorXd xm = x;
      xm(k) -= h;
      j.col(k) = (f(xp) - f(xm)) / (2.0 * h);
    } else {
      j.col(k) = (f(xp) - r0) / h;
    }
  }
  return j;
}

}  // namespace levmar_detail

inline LevMarResult levmar(const ResidualFn& f, Eigen::VectorXd x, const LevMarOptions& opt = {},
                           const JacobianFn& jac = nullptr) {
  LevMarResult out;
  Eigen::VectorXd r = f(x);
  double cost = r.squaredNorm();
  double lambda = opt.lambda0;
  const int n = static_cast<int>(x.size());

  Eigen::MatrixXd j;
  bool j_fresh = false;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (!j_fresh) {
      j = jac ? jac(x) : levmar_detail::fd_jacobian(f, x, r, opt);
      j_fresh = true;
    }
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < opt.gtol) {
      out.converged = true;
      break;
    }

    bool accepted = false;
    while (lambda <= opt.lambda_max) {
      Eigen::MatrixXd a = jtj;
      for (int k = 0; k < n; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-30);
      const Eigen::VectorXd step = a.ldlt().solve(-g);
      const Eigen::VectorXd xt = x + step;
      const Eigen::VectorXd rt = f(xt);
      const double ct = rt.squaredNorm();
      if (ct < cost) {
        const double reduction = (cost - ct) / std::max(cost, 1e-300);
        const double step_rel = step.norm() / std::max(x.norm(), 1e-300);
        x = xt;
        r = rt;
        cost = ct;
        lambda = std::max(lambda / 3.0, 1e-12);
        j_fresh = false;
        accepted = true;
        if (reduction < opt.ftol || step_rel < opt.xtol) out.converged = true;
        break;
      }
      lambda *= 5.0;
    }
    if (!accepted) {
      // damping exhausted: local minimum to working precision
      out.converged = true;
      break;
    }
    if (out.converged) break;
  }

  out.params = x;
  out.residuals = r;
  out.cost = cost;
  out.iterations = it + 1;

  // covariance from the Jacobian at the optimum
  const Eigen::MatrixXd jf = jac ? jac(x) : levmar_detail::fd_jacobian(f, x, r, opt);
  const int m = static_cast<int>(r.size());
  Eigen::MatrixXd jtj = jf.transpose() * jf;
  const double sigma2 = m > n ? cost / (m - n) : 0.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  if (lu.isInvertible())
    out.covariance = sigma2 * lu.inverse();
  else
    out.covariance = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  return out;
}

}  // namespace hyperspec
