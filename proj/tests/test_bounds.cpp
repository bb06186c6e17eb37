#include "minidx/bounds.hpp"
#include "minidx/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace minidx;

namespace {
struct Torus {
  DiscreteHypersurface hyp = build_hypersurface(make_sphere(3), CatalogKind::CliffordTorus, {}, {48, 48});
  SpectrumReport sp = spectrum(assemble_jacobi(hyp), 0);
  std::vector<DiscreteOneForm> forms = catalog_harmonic_forms(hyp);
};
const Torus& torus() {
  static Torus t;
  return t;
}
}  // namespace

TEST_CASE("wedge certificate across eta") {
  const auto& t = torus();
  auto c0 = concentration_certificate(t.hyp, t.forms, 0.0, CertificateMode::Wedge, t.sp);
  CHECK(c0.pass);
  CHECK(c0.required == 1);
  CHECK(c0.required_exact == Rational(1, 3));
  CHECK(c0.actual == 5);
  // Just above the integrand ratio -2 the hypothesis still holds.
  auto c1 = concentration_certificate(t.hyp, t.forms, -2.0 + 1e-6, CertificateMode::Wedge, t.sp);
  CHECK(c1.pass);
  CHECK(c1.hypothesis_margin < 0);
  // Below it the hypothesis fails.
  auto c2 = concentration_certificate(t.hyp, t.forms, -2.5, CertificateMode::Wedge, t.sp);
  CHECK_FALSE(c2.pass);
  CHECK(c2.hypothesis_margin > 0);
}

TEST_CASE("star certificate threshold is 2 eta") {
  const auto& t = torus();
  auto c = concentration_certificate(t.hyp, t.forms, -1.5, CertificateMode::Star, t.sp);
  CHECK(c.required_exact == Rational(1, 4));
  CHECK(c.normalized_margin == doctest::Approx(-2.0 + 1.5).epsilon(1e-8));
  CHECK(c.pass);
}

TEST_CASE("index bound for the Clifford torus is tight") {
  auto ib = index_bound_report(torus().hyp, 2, torus().sp.morse_index);
  CHECK(ib.bound == 5);
  CHECK(ib.consistent);
  CHECK(ib.tight);
}

TEST_CASE("constants in exact arithmetic") {
  CHECK(theorem_constant(ConstantFamily::ComplexProjective, 2).stated == Rational(1, 36));
  CHECK(theorem_constant(ConstantFamily::QuaternionicProjective, 2).stated == Rational(1, 105));
  CHECK(theorem_constant(ConstantFamily::CayleyPlane, 2).d == 27);
  CHECK_FALSE(theorem_constant(ConstantFamily::SphereTimesSphere, 2, 2).applies);
  CHECK(theorem_constant(ConstantFamily::Sphere, 2, 0, false).offset == 4);
  CHECK(theorem_constant(ConstantFamily::Sphere, 2, 0, true).offset == 0);
  for (const auto& c : constant_table(6)) CHECK(c.consistent());
}

TEST_CASE("pointwise margins") {
  CHECK(cross_margin(*make_cp(2), 200, 1).pass);
  auto hp = cross_margin(*make_hp(2), 200, 1);
  CHECK(hp.pass);
  CHECK(hp.max <= -16.0 + 1e-9);
  CHECK(cayley_cross_margin().max == doctest::Approx(-48.0));
  CHECK_THROWS(cross_margin(*make_sphere(3), 10, 1));
  auto q = product_q_margin(401, 1000, 2);
  CHECK(q.min >= 7.0 / 8.0 - 1e-12);
  CHECK(q.min == doctest::Approx(7.0 / 8.0).epsilon(1e-4));
  CHECK(product_q(0.0, 0.0) == doctest::Approx(product_q_definition(0.0, 0.0)).epsilon(1e-12));
  CHECK(convex_margin(*make_ellipsoid({1, 1, 1, 1.1}), 300, 3).pass);
  CHECK_FALSE(convex_margin(*make_ellipsoid({1, 1, 1, 2}), 300, 3).pass);
  auto s3 = scalar3_margin(*make_sphere(3), 300, 3);
  CHECK(s3.min == doctest::Approx(3.0));
}

TEST_CASE("sphere margin on the Clifford torus") {
  auto m = sphere_margin(torus().hyp, torus().forms[0]);
  CHECK(m.pass);
  CHECK(m.max == doctest::Approx(-2.0).epsilon(1e-8));
}

TEST_CASE("CP^2 equality-case residuals") {
  auto gs = build_hypersurface(make_cp(2), CatalogKind::GeodesicSphereCP, {}, {12, 12, 12});
  for (const char* f : {"one", "coord:3"}) {
    BorderlineReport b = borderline_cp_report(gs, borderline_field(f, gs.embed_dim()));
    CHECK(b.m == 2);
    CHECK(b.divergence < 1e-6);
    CHECK(b.decomposition < 1e-6);
    CHECK(b.traced_gauss < 1e-6);
    CHECK(b.jn_tangency < 1e-10);
  }
  auto torus_hyp = build_hypersurface(make_sphere(3), CatalogKind::CliffordTorus, {}, {8, 8});
  CHECK_THROWS_AS(borderline_cp_report(torus_hyp, borderline_field("one", 4)), MissingStructure);
  CHECK_THROWS(borderline_field("coord:9", 9));
}

TEST_CASE("refinement rule") {
  CHECK(residual_decays(1e-3, 4e-4));
  CHECK_FALSE(residual_decays(1e-3, 8e-4));
  CHECK(residual_decays(5e-9, 6e-9));
}
