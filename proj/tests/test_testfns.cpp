#include "minidx/errors.hpp"
#include "minidx/testfns.hpp"

#include <doctest.h>

#include <random>

using namespace minidx;

namespace {
struct Torus {
  DiscreteHypersurface hyp = build_hypersurface(make_sphere(3), CatalogKind::CliffordTorus, {}, {48, 48});
  SpectralSystem sys = assemble_jacobi(hyp);
  std::vector<DiscreteOneForm> forms = catalog_harmonic_forms(hyp);
};
const Torus& torus() {
  static Torus t;
  return t;
}
}  // namespace

TEST_CASE("mode names round-trip") {
  for (TestMode m : {TestMode::Coordinates, TestMode::StarCoordinates, TestMode::Wedge})
    CHECK(test_mode_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(test_mode_from_string("wedges"), IncompatibleKind);
}

TEST_CASE("test functions preserve |w|^2 pointwise") {
  for (TestMode m : {TestMode::Coordinates, TestMode::StarCoordinates, TestMode::Wedge}) {
    TestFunctionSet s = test_functions(torus().hyp, torus().forms[0], m);
    CHECK(s.max_norm_residual < 1e-12);
    CHECK(s.size() == (m == TestMode::Wedge ? 6 : 4));
  }
}

TEST_CASE("identities hold in every mode with integrand ratio -2") {
  for (TestMode m : {TestMode::Coordinates, TestMode::StarCoordinates, TestMode::Wedge}) {
    QIdentityReport r = q_identity_report(torus().sys, torus().forms[1], m);
    CHECK(r.residual < 1e-8);
    CHECK(r.rhs / r.mass == doctest::Approx(-2.0).epsilon(1e-10));
  }
}

TEST_CASE("sum over test functions is independent of the axes") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Mat a = Mat::NullaryExpr(4, 4, [&] { return g(rng); });
  Mat q = Eigen::HouseholderQR<Mat>(a).householderQ();
  QIdentityReport r1 = q_identity_report(torus().sys, torus().forms[0], TestMode::Wedge);
  QIdentityReport r2 = q_identity_report(torus().sys, torus().forms[0], TestMode::Wedge, 1e-6, q);
  CHECK(std::abs(r1.lhs - r2.lhs) < 1e-9 * std::abs(r1.lhs));
}

TEST_CASE("integrand quadratic form matches direct integration") {
  IntegrandForm f = integrand_quadratic_form(torus().hyp, torus().forms, IntegrandKind::Wedge);
  Vec c(2);
  c << 0.3, -1.2;
  const double direct = integrand_integral(torus().hyp, combine(torus().forms, c), IntegrandKind::Wedge);
  CHECK(f.evaluate(c) == doctest::Approx(direct).epsilon(1e-10));
  CHECK(f.max_ratio() == doctest::Approx(-2.0).epsilon(1e-10));
  IntegrandForm s = integrand_quadratic_form(torus().hyp, torus().forms, IntegrandKind::CoordinatesWithStar);
  CHECK(s.max_ratio() == doctest::Approx(-4.0).epsilon(1e-10));
}

TEST_CASE("exact forms are rejected as non-harmonic") {
  Vec a = Vec::Zero(4);
  a(1) = 1.0;
  CHECK_THROWS_AS(q_identity_report(torus().sys, exact_form(torus().hyp, a), TestMode::Wedge), NotHarmonic);
}

TEST_CASE("S^1 x S^{n-1} in S^1 x S^n: integrand ratio -(n-2)") {
  for (int n : {3, 4}) {
    CatalogParams p;
    p.n = n;
    auto hyp = build_hypersurface(make_circle_times_sphere(n), CatalogKind::CircleTimesEquator, p, {});
    auto sys = assemble_jacobi(hyp);
    QIdentityReport r = q_identity_report(sys, catalog_harmonic_forms(hyp)[0], TestMode::Wedge);
    CHECK(r.residual < 1e-8);
    CHECK(r.rhs / r.mass == doctest::Approx(-(n - 2.0)).epsilon(1e-8));
  }
}

TEST_CASE("coordinate modes need a surface") {
  CatalogParams p;
  p.n = 3;
  auto hyp = build_hypersurface(make_sphere(4), CatalogKind::GeneralizedClifford, p, {});
  auto sys = assemble_jacobi(hyp);
  CHECK_THROWS_AS(q_identity_report(sys, catalog_harmonic_forms(hyp)[0], TestMode::Coordinates), InvalidDimension);
}
