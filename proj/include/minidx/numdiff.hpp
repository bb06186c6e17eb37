#pragma once

// Central finite differences with one Richardson level. Used as the fallback
// derivative for charts without closed forms and as a test oracle.

#include <Eigen/Dense>

namespace minidx::numdiff {

/// d/dt f(t) at t = 0; f returns a vector (or anything with Eigen arithmetic).
template <class F>
auto derivative(F&& f, double h) {
  auto d = [&](double s) { return ((f(s) - f(-s)) / (2.0 * s)).eval(); };
  return ((4.0 * d(h / 2) - d(h)) / 3.0).eval();
}

/// d^2/dt^2 f(t) at t = 0.
template <class F>
auto second_derivative(F&& f, double h) {
  auto f0 = f(0.0);
  auto d = [&](double s) { return ((f(s) - 2.0 * f0 + f(-s)) / (s * s)).eval(); };
  return ((4.0 * d(h / 2) - d(h)) / 3.0).eval();
}

/// Scalar version of derivative().
template <class F>
double derivative_scalar(F&& f, double h) {
  auto d = [&](double s) { return (f(s) - f(-s)) / (2.0 * s); };
  return (4.0 * d(h / 2) - d(h)) / 3.0;
}

/// Gradient of a scalar function of a vector.
template <class F>
Eigen::VectorXd gradient(F&& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    g(i) = derivative_scalar(
        [&](double s) {
          Eigen::VectorXd y = x;
          y(i) += s;
          return f(y);
        },
        h);
  }
  return g;
}

/// Hessian of a scalar function of a vector from four-point mixed stencils.
template <class F>
Eigen::MatrixXd hessian(F&& f, const Eigen::VectorXd& x, double h) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd hess(n, n);
  auto mixed = [&](int i, int j, double s) {
    auto at = [&](double a, double b) {
      Eigen::VectorXd y = x;
      y(i) += a;
      y(j) += b;
      return f(y);
    };
    if (i == j) return (at(s, 0) - 2.0 * f(x) + at(-s, 0)) / (s * s);
    return (at(s, s) - at(s, -s) - at(-s, s) + at(-s, -s)) / (4.0 * s * s);
  };
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = (4.0 * mixed(i, j, h / 2) - mixed(i, j, h)) / 3.0;
      hess(i, j) = v;
      hess(j, i) = v;
    }
  return hess;
}

/// Jacobian of a vector function of a vector; column a is d f / d x_a.
template <class F>
Eigen::MatrixXd jacobian(F&& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (int a = 0; a < x.size(); ++a) {
    jac.col(a) = derivative(
        [&](double s) -> Eigen::VectorXd {
          Eigen::VectorXd y = x;
          y(a) += s;
          return f(y);
        },
        h);
  }
  return jac;
}

/// Mixed second partial d^2 f / dx_a dx_b of a vector function.
template <class F>
Eigen::VectorXd second_partial(F&& f, const Eigen::VectorXd& x, int a, int b, double h) {
  auto at = [&](double s, double t) -> Eigen::VectorXd {
    Eigen::VectorXd y = x;
    y(a) += s;
    y(b) += t;
    return f(y);
  };
  auto d = [&](double s) -> Eigen::VectorXd {
    if (a == b) return (at(s, 0) - 2.0 * f(x) + at(-s, 0)) / (s * s);
    return (at(s, s) - at(s, -s) - at(-s, s) + at(-s, -s)) / (4.0 * s * s);
  };
  return (4.0 * d(h / 2) - d(h)) / 3.0;
}

}  // namespace minidx::numdiff
