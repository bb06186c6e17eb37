#include "minidx/eigensolve.hpp"
#include "minidx/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace minidx;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  auto [x, w] = gauss_legendre(8);
  for (int k = 0; k <= 15; ++k) {
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) s += w(i) * std::pow(x(i), k);
    const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
    CHECK(s == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("axis weights integrate the parameter measure") {
  CHECK(make_axis(AxisKind::Periodic, 17).weights.sum() == doctest::Approx(2 * M_PI));
  // Colatitude weights integrate d(phi); with the sin(phi) metric factor they
  // become Gauss-Legendre in cos(phi) and exact on polynomials in cos(phi).
  ParamAxis c = make_axis(AxisKind::Colatitude, 12);
  double area = 0.0, cos2 = 0.0;
  for (int i = 0; i < c.size(); ++i) {
    area += c.weights(i) * std::sin(c.nodes(i));
    cos2 += c.weights(i) * std::sin(c.nodes(i)) * std::pow(std::cos(c.nodes(i)), 2);
  }
  CHECK(area == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(cos2 == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("dense and shift-invert solvers on the path Laplacian") {
  const int n = 60;
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i + 1 < n) {
      t.emplace_back(i, i + 1, -1.0);
      t.emplace_back(i + 1, i, -1.0);
    }
  }
  SpMat k(n, n), m(n, n);
  k.setFromTriplets(t.begin(), t.end());
  m.setIdentity();
  ShiftInvertOptions o;
  o.shift = -1e-3;
  EigenPairs sp = sparse_lowest(k, m, 4, o);
  EigenPairs dn = dense_lowest(Eigen::MatrixXd(k), Eigen::MatrixXd(m), 4);
  for (int j = 0; j < 4; ++j) {
    const double exact = 2.0 - 2.0 * std::cos((j + 1) * M_PI / (n + 1));
    CHECK(sp.values(j) == doctest::Approx(exact).epsilon(1e-9));
    CHECK(dn.values(j) == doctest::Approx(exact).epsilon(1e-12));
  }
}
