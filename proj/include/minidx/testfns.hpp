#pragma once

// Test functions built from a harmonic one-form: Euclidean coordinates of
// w# (and of *w# on surfaces) or of N ^ w# in Lambda^2 R^d. Both sides of the
// index-form identities are evaluated independently: the left side through the
// discrete index form, the right side by quadrature of a curvature integrand.

#include "minidx/hodge.hpp"
#include "minidx/spectral.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace minidx {

enum class TestMode {
  Coordinates,      // u_i = <w#, theta_i>
  StarCoordinates,  // u*_i = <(*w)#, theta_i>, surfaces only
  Wedge,            // u_ij = <N ^ w#, theta_i ^ theta_j>, i < j
};
std::string to_string(TestMode m);
TestMode test_mode_from_string(const std::string& s);

struct TestFunctionSet {
  TestMode mode = TestMode::Coordinates;
  std::vector<std::pair<int, int>> labels;  // (i, -1) or (i, j)
  Mat values;                 // functions x nodes
  double max_norm_residual = 0.0;  // max_x |sum u^2 - |w|^2|

  int size() const { return static_cast<int>(values.rows()); }
};

/// `axes` (d x d orthogonal) replaces the standard basis theta_i by its columns.
TestFunctionSet test_functions(const DiscreteHypersurface& hyp, const DiscreteOneForm& form,
                               TestMode mode, const std::optional<Mat>& axes = std::nullopt);

/// Pointwise integrands, quadratic in w.
enum class IntegrandKind {
  Coordinates,          // sum_k |II(e_k,w#)|^2 - (R/2)|w|^2
  Wedge,                // sum_k |II(e_k,w#)|^2 + sum_k |II(e_k,N)|^2 |w|^2
                        //   - sum_k Rm(e_k,w#,e_k,w#) - Ric(N,N)|w|^2
  CoordinatesWithStar,  // sum_k |II(e_k,w#)|^2 + |II(e_k,(*w)#)|^2 - R|w|^2, n = 2
};
std::string to_string(IntegrandKind k);
IntegrandKind integrand_kind_from_string(const std::string& s);

/// Integrand at a node for frame components c of w.
double pointwise_integrand(const DiscreteHypersurface& hyp, int node, const Vec& c,
                           IntegrandKind kind);
/// n x n symmetric matrix P with integrand = c' P c, by polarization.
Mat pointwise_integrand_matrix(const DiscreteHypersurface& hyp, int node, IntegrandKind kind);
/// Quadrature of the integrand for one form.
double integrand_integral(const DiscreteHypersurface& hyp, const DiscreteOneForm& form,
                          IntegrandKind kind);

double form_mass(const DiscreteHypersurface& hyp, const DiscreteOneForm& form);

struct QIdentityReport {
  TestMode mode = TestMode::Coordinates;
  double lhs = 0.0;    // sum Q(u, u)
  double rhs = 0.0;    // integral of the integrand
  double mass = 0.0;   // int |w|^2
  double residual = 0.0;             // |lhs - rhs| / mass
  double projection_residual = 0.0;  // worst relative L2 loss projecting u onto the Ritz basis
  double bochner = 0.0;
  double norm_residual = 0.0;
};

/// Throws NotHarmonic when the Bochner residual of w exceeds `harmonic_tol`
/// and InvalidDimension for the coordinate modes off surfaces.
QIdentityReport q_identity_report(const SpectralSystem& system, const DiscreteOneForm& form,
                                 TestMode mode, double harmonic_tol = 1e-6,
                                 const std::optional<Mat>& axes = std::nullopt);

/// Q(u, u) for a node function, mapped to mesh vertices for P1 systems (pole
/// vertices take the mean of their ring).
double index_form(const SpectralSystem& system, const Vec& node_values,
                  double* projection_residual = nullptr);

struct IntegrandForm {
  IntegrandKind kind = IntegrandKind::Wedge;
  Mat gram;  // c' G c = integral of the integrand for sum c_a w_a
  Mat mass;  // c' M c = int |w|^2

  int dimension() const { return static_cast<int>(gram.rows()); }
  /// Largest lambda with G v = lambda M v; G - eta M is negative definite iff
  /// this is < eta.
  double max_ratio() const;
  double evaluate(const Vec& c) const { return c.dot(gram * c); }
};

/// Throws IllConditionedBasis when the forms are (numerically) dependent.
IntegrandForm integrand_quadratic_form(const DiscreteHypersurface& hyp,
                                       const std::vector<DiscreteOneForm>& forms,
                                       IntegrandKind kind);

}  // namespace minidx
