#include "minidx/spectral.hpp"

#include <doctest.h>

#include <sstream>

using namespace minidx;

TEST_CASE("Ritz spectrum of the equator of S^3") {
  // J = Delta + 2: eigenvalues l(l+1) - 2 with multiplicity 2l+1.
  auto e = build_hypersurface(make_sphere(3), CatalogKind::EquatorInSphere, {}, {});
  SpectrumReport r = spectrum(assemble_jacobi(e), 0);
  const double expected[9] = {-2, 0, 0, 0, 4, 4, 4, 4, 4};
  for (int k = 0; k < 9; ++k) CHECK(std::abs(r.eigenvalues(k) - expected[k]) < 1e-9);
  CHECK(r.morse_index == 1);
  CHECK(r.complete);
  auto mult = r.multiplicities();
  REQUIRE(mult.size() >= 3);
  CHECK(mult[0] == 1);
  CHECK(mult[1] == 3);
  CHECK(mult[2] == 5);
}

TEST_CASE("P1 spectrum of the Clifford torus converges to the analytic values") {
  SpectralOptions o;
  o.discretization = Discretization::P1;
  auto t = build_hypersurface(make_sphere(3), CatalogKind::CliffordTorus, {}, {32, 32});
  SpectrumReport r = spectrum(assemble_jacobi(t, o), 10);
  CHECK(r.eigenvalues(0) == doctest::Approx(-4.0).epsilon(0.02));
  for (int k = 1; k < 5; ++k) CHECK(r.eigenvalues(k) == doctest::Approx(-2.0).epsilon(0.02));
  CHECK(r.morse_index == 5);
}

TEST_CASE("count_below is strict") {
  auto t = build_hypersurface(make_sphere(3), CatalogKind::CliffordTorus, {}, {24, 24});
  SpectrumReport r = spectrum(assemble_jacobi(t), 0);
  CHECK(r.count_below(-2.0) == 1);
  CHECK(r.count_below(-2.0 + 1e-6) == 5);
  CHECK(r.count_below(0.0) == 5);
  CHECK(r.count_below(1e-6) == 9);
}

TEST_CASE("parity restriction on the antipodal torus") {
  // Even functions: -4 and the zero cluster; odd: the -2 cluster.
  auto t = build_hypersurface(make_real_projective(3), CatalogKind::CliffordTorus, {}, {24, 24});
  SpectralOptions o;
  o.parity = ParityRestriction::Even;
  SpectrumReport even = spectrum(assemble_jacobi(t, o), 0);
  o.parity = ParityRestriction::Odd;
  SpectrumReport odd = spectrum(assemble_jacobi(t, o), 0);
  CHECK(even.eigenvalues(0) == doctest::Approx(-4.0));
  CHECK(std::abs(even.eigenvalues(1)) < 1e-9);
  for (int k = 0; k < 4; ++k) CHECK(odd.eigenvalues(k) == doctest::Approx(-2.0));
  CHECK(odd.eigenvalues(4) > 0.0);
}

TEST_CASE("Rayleigh quotient of constants is minus the mean potential") {
  auto t = build_hypersurface(make_sphere(3), CatalogKind::CliffordTorus, {}, {24, 24});
  SpectralSystem sys = assemble_jacobi(t);
  CHECK(sys.rayleigh_quotient(Vec::Ones(t.node_count())) == doctest::Approx(-4.0));
}

TEST_CASE("spectrum CSV") {
  auto e = build_hypersurface(make_sphere(3), CatalogKind::EquatorInSphere, {}, {});
  SpectrumReport r = spectrum(assemble_jacobi(e), 0);
  std::ostringstream out;
  write_spectrum_csv(out, r);
  CHECK(out.str().rfind("index,eigenvalue,residual,cluster\n", 0) == 0);
}
