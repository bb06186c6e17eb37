#include "minidx/errors.hpp"
#include "minidx/hypersurface.hpp"
#include "minidx/trimesh.hpp"

#include <doctest.h>

#include <cmath>

using namespace minidx;

TEST_CASE("Clifford torus geometry") {
  auto t = build_hypersurface(make_sphere(3), CatalogKind::CliffordTorus, {}, {32, 32});
  CHECK(t.volume() == doctest::Approx(2 * M_PI * M_PI).epsilon(1e-12));
  CHECK(t.mean_curvature_residual() < 1e-10);
  // Principal curvatures +-1: |A|^2 = 2, Ric(N,N) = 2.
  CHECK(t.shape_norm2.minCoeff() == doctest::Approx(2.0));
  CHECK(t.shape_norm2.maxCoeff() == doctest::Approx(2.0));
  CHECK(t.potential.maxCoeff() == doctest::Approx(4.0));
  CHECK(triangulate(t).euler_characteristic() == 0);
  auto cover = lift_to_double_cover(t);
  CHECK(cover.normal_oddness < 1e-10);
}

TEST_CASE("generalized Clifford S^1(sqrt(1/3)) x S^2(sqrt(2/3)) in S^4") {
  CatalogParams p;
  p.n = 3;
  auto g = build_hypersurface(make_sphere(4), CatalogKind::GeneralizedClifford, p, {});
  const double r1 = std::sqrt(1.0 / 3.0), r2 = std::sqrt(2.0 / 3.0);
  CHECK(g.volume() == doctest::Approx(2 * M_PI * r1 * 4 * M_PI * r2 * r2).epsilon(1e-8));
  CHECK(g.mean_curvature_residual() < 1e-8);
  CHECK(g.shape_norm2.maxCoeff() == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("equator of S^3 is totally geodesic with area 4 pi") {
  auto e = build_hypersurface(make_sphere(3), CatalogKind::EquatorInSphere, {}, {});
  CHECK(e.volume() == doctest::Approx(4 * M_PI).epsilon(1e-10));
  CHECK(e.shape_norm2.maxCoeff() < 1e-12);
  CHECK(triangulate(e).euler_characteristic() == 2);
}

double minimal_radius_bisect(int m) {
  auto f = [m](double r) { return 2.0 / std::tan(2 * r) + (2.0 * m - 2.0) / std::tan(r); };
  double a = M_PI / 4 + 1e-9, b = M_PI / 2 - 1e-9;
  for (int i = 0; i < 200; ++i) {
    const double c = 0.5 * (a + b);
    (f(a) * f(c) <= 0 ? b : a) = c;
  }
  return 0.5 * (a + b);
}

TEST_CASE("minimal geodesic spheres of CP^m") {
  CHECK(geodesic_sphere_minimal_radius(2, 1e-13) == doctest::Approx(M_PI / 3).epsilon(1e-12));
  for (int m : {3, 4})
    CHECK(geodesic_sphere_minimal_radius(m, 1e-13) == doctest::Approx(minimal_radius_bisect(m)).epsilon(1e-11));
  auto gs = build_hypersurface(make_cp(2), CatalogKind::GeodesicSphereCP, {}, {12, 12, 12});
  CHECK(gs.mean_curvature_residual() < 1e-8);
  CHECK(gs.volume() == doctest::Approx(*gs.chart.volume).epsilon(1e-8));
}

TEST_CASE("intrinsic curvature agrees with the Gauss equation") {
  auto t = build_hypersurface(make_sphere(3), CatalogKind::CliffordTorus, {}, {24, 24});
  for (int a = 0; a < t.node_count(); a += 37) {
    Mat k = intrinsic_sectional(t, a);
    CHECK(std::abs(k(0, 1)) < 1e-7);  // flat torus
    CHECK(std::abs(gauss_riemann(t, a, Vec::Unit(2, 0), Vec::Unit(2, 1))) < 1e-10);
  }
}

TEST_CASE("catalog and ambient mismatches are rejected") {
  CHECK_THROWS(make_chart(*make_cp(2), CatalogKind::CliffordTorus, {}));
  CHECK_THROWS(make_chart(*make_sphere(3), CatalogKind::GeodesicSphereCP, {}));
  CHECK_THROWS_AS(catalog_kind_from_string("catenoid"), IncompatibleKind);
}
