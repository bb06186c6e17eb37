#pragma once

// Index lower bounds from harmonic one-forms: the counting certificates, the
// table of theorem constants in exact arithmetic, pointwise margins of the
// individual applications and the checks behind the CP^m equality case.

#include "minidx/spectral.hpp"
#include "minidx/testfns.hpp"

#include <boost/rational.hpp>

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace minidx {

using Rational = boost::rational<long long>;

// ---- Certificates --------------------------------------------------------------

enum class CertificateMode {
  Wedge,  // test functions u_ij; count >= 2q / (d(d-1))
  Star,   // surfaces, u_i and u*_i; count >= q / (2d), threshold 2 eta
};
std::string to_string(CertificateMode m);
CertificateMode certificate_mode_from_string(const std::string& s);

struct CertificateReport {
  CertificateMode mode = CertificateMode::Wedge;
  double eta = 0.0;
  int q = 0;
  int d = 0;
  Rational required_exact{0};  // un-ceiled bound as a fraction of q
  double required_value = 0.0;
  int required = 0;            // ceiling of required_value
  int actual = 0;              // count_below(eta)
  bool count_complete = true;  // false when the computed spectrum may miss eigenvalues below eta
  double hypothesis_margin = 0.0;   // largest eigenvalue of G - c eta M (c = 1 or 2)
  double normalized_margin = 0.0;   // largest ratio of (G, M) divided by c, minus eta
  bool pass = false;

  std::string verdict() const { return pass ? "pass" : "fail"; }
};

/// `spectrum` must come from the same discretization the caller trusts for
/// the count; parity-restricted spectra give the one-sided count.
CertificateReport concentration_certificate(const DiscreteHypersurface& hyp,
                                            const std::vector<DiscreteOneForm>& forms, double eta,
                                            CertificateMode mode, const SpectrumReport& spectrum);

// ---- Theorem constants -------------------------------------------------------------

enum class ConstantFamily {
  Sphere,              // S^{n+1}, d = n+2, plus n+2 off the totally geodesic case
  RealProjective,      // RP^{n+1} through its double cover, d = n+2
  ComplexProjective,   // CP^m, d = (m+1)^2
  QuaternionicProjective,  // HP^p, d = (p+1)(2p+1)
  CayleyPlane,         // CaP^2, d = 27 (no chart)
  CircleTimesSphere,   // S^1 x S^n, d = n+3
  SphereTimesSphere,   // S^p x S^q, d = p+q+2, (2,2) excluded
  EuclideanHypersurface,  // N^{n+1} in R^{n+2}, d = n+2
};
std::string to_string(ConstantFamily f);

struct TheoremConstant {
  ConstantFamily family = ConstantFamily::Sphere;
  std::string label;
  long long d = 0;
  Rational stated{0};  // the closed form written for the family
  Rational from_d{0};  // 2 / (d(d-1))
  int offset = 0;      // added to the bound (sphere, not totally geodesic)
  bool applies = true;
  std::string note;

  bool consistent() const { return stated == from_d; }
};

/// a, b are the family parameters (n, m, p, or p and q).
TheoremConstant theorem_constant(ConstantFamily family, int a, int b = 0,
                                 bool totally_geodesic = false);
TheoremConstant theorem_constant(const AmbientModel& ambient, bool totally_geodesic = false);

/// Every family for parameters 1..max_param (as far as defined).
std::vector<TheoremConstant> constant_table(int max_param = 6);

struct IndexBoundReport {
  TheoremConstant constant;
  int betti = 0;
  double value = 0.0;  // C b1 + offset
  int bound = 0;       // ceil(C b1) + offset
  int index = 0;
  bool consistent = false;  // index >= bound
  bool tight = false;
};

IndexBoundReport index_bound_report(const DiscreteHypersurface& hyp, int betti, int index);

// ---- Application margins ---------------------------------------------------------

struct MarginReport {
  std::string id;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  int samples = 0;
  bool pass = false;
  std::map<std::string, double> values;  // thresholds and auxiliary residuals
  std::string note;
};

/// Pointwise integrand / |w|^2 over the nodes where w does not vanish.
MarginReport integrand_margin(const DiscreteHypersurface& hyp, const DiscreteOneForm& form,
                              IntegrandKind kind, double threshold);

/// Wedge integrand of a harmonic form on a minimal hypersurface of a round
/// sphere compared with -(2n-2).
MarginReport sphere_margin(const DiscreteHypersurface& hyp, const DiscreteOneForm& form);

/// (8/3)(n+3-K) on random frames of a projective ambient, with the two partial
/// identities and the CP^m equality analysis attached.
MarginReport cross_margin(const AmbientModel& ambient, int samples, unsigned seed);
/// Table values for the Cayley plane (no chart): n+1 = 16, K = 36.
MarginReport cayley_cross_margin();

/// Closed form of q(theta, phi) and its defining expression.
double product_q(double theta, double phi);
double product_q_definition(double theta, double phi);
/// q on a (grid x grid) grid over [0,pi]^2 plus `samples` random angle pairs.
MarginReport product_q_margin(int grid, int samples, unsigned seed);

/// Principal-curvature pinching 4 k_max^2 - 2(n+1) k_min^2 of a convex
/// hypersurface of R^{n+2}, sampled at random points and axis endpoints.
MarginReport convex_margin(const AmbientModel& ambient, int samples, unsigned seed);

/// 2R - |H|^2 on a three-dimensional ambient of R^4 and R = |H|^2 - |II|^2 on any.
MarginReport scalar3_margin(const AmbientModel& ambient, int samples, unsigned seed);

// ---- CP^m equality case -------------------------------------------------------------

/// Scalar field on the hypersurface given as a function of the R^d position.
using PositionField = std::function<double(const Vec&)>;
PositionField borderline_field(const std::string& spec, int embed_dim);  // one | zero | coord:i

struct BorderlineReport {
  double divergence = 0.0;     // max |div_M JN|
  double decomposition = 0.0;  // max |(|nabla w#|^2) - (|nabla f|^2 + f^2 |nabla JN|^2)|, w# = f JN
  double traced_gauss = 0.0;   // max |Ric^M(U,U) + |A(U,.)|^2 - (2m-2)|, U = JN
  double ambient_chain = 0.0;  // max |Ric^N(U,U) - Rm^N(U,N,U,N) - (2m-2)|
  double jn_tangency = 0.0;    // max |<JN, N>|
  double mean_curvature = 0.0;
  int m = 0;

  double max_residual() const;
};

/// Throws MissingStructure for ambients without a complex structure.
BorderlineReport borderline_cp_report(const DiscreteHypersurface& hyp, const PositionField& f);

/// Refinement check: pointwise residuals sit at the finite-difference floor, so
/// the pair passes when the fine value halves or is already below `floor`.
bool residual_decays(double coarse, double fine, double floor = 1e-8);

}  // namespace minidx
