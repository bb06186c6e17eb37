#include "minidx/errors.hpp"
#include "minidx/hodge.hpp"

#include <doctest.h>

#include <cmath>

using namespace minidx;

namespace {
const DiscreteHypersurface& torus48() {
  static DiscreteHypersurface t = build_hypersurface(make_sphere(3), CatalogKind::CliffordTorus, {}, {48, 48});
  return t;
}
}  // namespace

TEST_CASE("Whitney Laplacian annihilates the cochain of d theta") {
  HodgeLaplacian h = assemble_hodge_laplacian(torus48());
  Vec c = h.cochain([](const Vec&) {
    Vec v(2);
    v << 1.0, 0.0;
    return v;
  });
  CHECK(h.residual(c) < 1e-9);
}

TEST_CASE("Hodge solver recovers span{d theta_1, d theta_2}") {
  HodgeResult r = harmonic_one_forms(torus48());
  CHECK(r.from_solver);
  CHECK(r.kernel_dimension == 2);
  CHECK_FALSE(r.unexpected_kernel);
  std::vector<DiscreteOneForm> span{coordinate_form(torus48(), 0), coordinate_form(torus48(), 1)};
  CHECK(span_distance(torus48(), r.basis, span) < 1e-6);
  // Orthonormal output.
  Mat g = gram_matrix(torus48(), r.basis);
  CHECK((g - Mat::Identity(2, 2)).norm() < 1e-8);
}

TEST_CASE("d theta_1 has |w|^2 = 2 and mass 4 pi^2") {
  // Radii 1/sqrt(2): |d theta|^2 = 1/r^2.
  DiscreteOneForm w = coordinate_form(torus48(), 0);
  CHECK(l2_inner(torus48(), w, w) == doctest::Approx(2.0 * 2 * M_PI * M_PI));
}

TEST_CASE("Bochner residual separates harmonic and exact forms") {
  for (const auto& f : catalog_harmonic_forms(torus48())) {
    CHECK(bochner_residual(torus48(), f) < 1e-10);
    CHECK(bochner_residual(torus48(), hodge_star_surface(torus48(), f)) < 1e-10);
  }
  Vec a = Vec::Zero(4);
  a(0) = 1.0;
  CHECK(bochner_residual(torus48(), exact_form(torus48(), a)) > 0.1);
}

TEST_CASE("star rotates by a right angle") {
  DiscreteOneForm w = coordinate_form(torus48(), 0);
  DiscreteOneForm s = hodge_star_surface(torus48(), w);
  CHECK(std::abs(l2_inner(torus48(), w, s)) < 1e-10);
  CHECK(l2_inner(torus48(), s, s) == doctest::Approx(l2_inner(torus48(), w, w)));
}

TEST_CASE("sphere has no harmonic one-forms") {
  auto e = build_hypersurface(make_sphere(3), CatalogKind::EquatorInSphere, {}, {});
  HodgeResult r = harmonic_one_forms(e);
  CHECK(r.kernel_dimension == 0);
  CHECK(r.eigenvalues(0) > 1.0);
}

TEST_CASE("dependent bases are rejected") {
  DiscreteOneForm w = coordinate_form(torus48(), 0);
  CHECK_THROWS_AS(orthonormalize(torus48(), {w, w}), IllConditionedBasis);
}
