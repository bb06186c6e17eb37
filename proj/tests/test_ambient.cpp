#include "minidx/ambient.hpp"
#include "minidx/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace minidx;

TEST_CASE("round sphere second fundamental form is -<X,Y> p") {
  auto s = make_sphere(3);
  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    AmbientPoint p = s->random_point(rng);
    auto [x, y] = random_orthonormal_pair(*s, p, rng);
    Vec z = 0.3 * x + 0.7 * y;
    CHECK((s->second_fundamental_form(p, x, z) + x.dot(z) * p.position).norm() < 1e-12);
    CHECK(riemann_xyxy(*s, p, x, y) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Einstein constants match the symmetric-space values") {
  // S^{n+1}: n; CP^m: 2m+2; HP^p: 4p+8 (real dimension 4p).
  struct Case {
    AmbientPtr model;
    double ricci;
  };
  for (const auto& c : {Case{make_sphere(4), 3.0}, Case{make_real_projective(3), 2.0}, Case{make_cp(2), 6.0},
                        Case{make_cp(3), 8.0}, Case{make_hp(2), 16.0}}) {
    Rng rng(2);
    for (int k = 0; k < 20; ++k) {
      AmbientPoint p = c.model->random_point(rng);
      Vec x = c.model->random_tangent(p, rng).normalized();
      CHECK(ricci(*c.model, p, x) == doctest::Approx(c.ricci).epsilon(1e-10));
    }
  }
}

TEST_CASE("CP^m sectional curvature ranges over [1, 4]") {
  auto r = verify_model_identities(*make_cp(2), 500, 3);
  CHECK(r.min_sectional >= 1.0 - 1e-10);
  CHECK(r.max_sectional <= 4.0 + 1e-10);
  CHECK(r.max_sectional > 3.5);
  CHECK(r.min_sectional < 1.5);
  CHECK(r.max_residual() < 1e-8);
}

TEST_CASE("every model passes its identity self-checks") {
  for (auto m : {make_sphere(3), make_real_projective(3), make_cp(3), make_hp(2), make_circle_times_sphere(3),
                 make_sphere_times_sphere(2, 3), make_ellipsoid({1, 1.2, 0.9, 2})}) {
    auto r = verify_model_identities(*m, 200, 4);
    INFO(m->label());
    CHECK(r.max_residual() < 1e-8);
  }
}

TEST_CASE("finite-difference II agrees with the closed form") {
  for (auto m : {make_cp(2), make_hp(2), make_ellipsoid({1, 2, 3, 1.5})}) {
    Rng rng(5);
    AmbientPoint p = m->random_point(rng);
    Vec x = m->random_tangent(p, rng).normalized();
    Vec exact = m->second_fundamental_form(p, x, x);
    Vec fd = second_fundamental_form_fd(*m, p, x, 1e-3);
    CHECK((exact - fd).norm() < 1e-7);
  }
}

TEST_CASE("product ambient: S^1 x S^2 has zero curvature on mixed planes") {
  auto m = make_circle_times_sphere(2);
  CHECK(m->embed_dim() == 5);
  Rng rng(6);
  AmbientPoint p = m->random_point(rng);
  Mat t = m->tangent_basis(p);
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const double k = riemann_xyxy(*m, p, t.col(i), t.col(j));
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
  CHECK(std::abs(lo) < 1e-12);
  CHECK(hi == doctest::Approx(1.0));
  CHECK_FALSE(m->einstein_constant().has_value());
}

TEST_CASE("ellipsoid scalar curvature from the Gauss equation") {
  // For a hypersurface of R^{n+2}: R = H^2 - |A|^2.
  auto e = make_ellipsoid({1, 1, 1, 1});
  Rng rng(7);
  AmbientPoint p = e->random_point(rng);
  CHECK(scalar_curvature(*e, p) == doctest::Approx(6.0));
  CHECK(mean_curvature_vector(*e, p).norm() == doctest::Approx(3.0));
}

TEST_CASE("bad inputs throw") {
  CHECK_THROWS_AS(make_sphere(1), InvalidDimension);
  CHECK_THROWS_AS(make_cp(0), InvalidDimension);
  CHECK_THROWS_AS(ambient_kind_from_string("torus"), IncompatibleKind);
  auto s = make_sphere(3);
  Rng rng(8);
  AmbientPoint p = s->random_point(rng);
  CHECK_THROWS_AS(s->second_fundamental_form(p, p.position, p.position), TangencyViolation);
  CHECK_THROWS_AS(frame_completing(*s, p, Vec::Zero(4)), FrameConstructionError);
}
