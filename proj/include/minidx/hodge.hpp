#pragma once

// Harmonic one-forms on catalog hypersurfaces: a Whitney-element Hodge solver
// for surfaces, analytic coordinate forms for product kinds, the surface
// Hodge star and the integrated Bochner identity.

#include "minidx/eigensolve.hpp"
#include "minidx/hypersurface.hpp"
#include "minidx/trimesh.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace minidx {

enum class FormProvenance { AnalyticCatalog, HodgeSolver, Probe };
std::string to_string(FormProvenance p);

struct DiscreteOneForm {
  std::string label;
  FormProvenance provenance = FormProvenance::Probe;
  Mat components;  // n x nodes, omega(e_k) in the node frame
  /// omega^sharp as an R^d vector at parameter t, when known in closed form.
  std::function<Vec(const Vec&)> sharp_at;

  Vec sharp(const DiscreteHypersurface& hyp, int node) const {
    return hyp.frame[node] * components.col(node);
  }
};

/// d x nodes matrix of omega^sharp.
Mat sharp_field(const DiscreteHypersurface& hyp, const DiscreteOneForm& form);

/// Orthonormal frame and e = J * frame_to_param at an arbitrary parameter.
struct FrameAt {
  Mat jacobian;
  Mat frame;
  Mat frame_to_param;
};
FrameAt frame_at(const DiscreteHypersurface& hyp, const Vec& t);

/// dt_a for a periodic parameter axis a.
DiscreteOneForm coordinate_form(const DiscreteHypersurface& hyp, int axis);
/// d(a . x): closed, generally not co-closed.
DiscreteOneForm exact_form(const DiscreteHypersurface& hyp, const Vec& a);
DiscreteOneForm zero_form(const DiscreteHypersurface& hyp);

/// Sum c_i forms_i; keeps a closed-form sharp when all inputs have one.
DiscreteOneForm combine(const std::vector<DiscreteOneForm>& forms, const Vec& coeffs);

double l2_inner(const DiscreteHypersurface& hyp, const DiscreteOneForm& a, const DiscreteOneForm& b);
Mat gram_matrix(const DiscreteHypersurface& hyp, const std::vector<DiscreteOneForm>& forms);

/// L2-orthonormal basis of span(forms); throws IllConditionedBasis when the
/// Gram matrix is numerically singular.
std::vector<DiscreteOneForm> orthonormalize(const DiscreteHypersurface& hyp,
                                            const std::vector<DiscreteOneForm>& forms);

/// Analytic harmonic forms of the catalog kind (coordinate forms of the flat
/// circle factors); empty for simply connected kinds.
std::vector<DiscreteOneForm> catalog_harmonic_forms(const DiscreteHypersurface& hyp);

// ---- Whitney discretization ---------------------------------------------------

struct HodgeLaplacian {
  std::shared_ptr<const TriMesh> mesh;
  SpMat d0;  // edges x vertices
  SpMat d1;  // triangles x edges
  SpMat m0;  // lumped vertex mass
  SpMat m1;  // Whitney 1-form mass
  SpMat m2;  // triangle mass (1 / area)
  SpMat laplacian;  // d1' M2 d1 + M1 d0 M0^-1 d0' M1

  /// Edge cochain of a form given by its parameter covector field (midpoint rule).
  Vec cochain(const std::function<Vec(const Vec&)>& param_covector) const;
  /// |L a| / |M1 a|.
  double residual(const Vec& cochain) const;
};

HodgeLaplacian assemble_hodge_laplacian(const DiscreteHypersurface& hyp);

struct HodgeOptions {
  int extra_eigenvalues = 4;  // computed beyond the expected Betti number
  double shift = -1e-6;       // shift of the inverse iteration (the kernel sits at 0)
  double gap = 1e6;           // kernel rank decision: mu_i * gap < mu_ref
};

struct HodgeResult {
  std::vector<DiscreteOneForm> basis;  // L2-orthonormal
  int kernel_dimension = 0;
  int expected_betti = 0;
  bool unexpected_kernel = false;
  Vec eigenvalues;               // lowest generalized eigenvalues of L a = mu M1 a
  double max_closedness = 0.0;   // |d1 a| / |a|
  double max_coclosedness = 0.0; // |d0' M1 a| / |M1 a|
  bool from_solver = false;
};

/// n = 2: Whitney solver. n >= 3: analytic catalog forms.
HodgeResult harmonic_one_forms(const DiscreteHypersurface& hyp, const HodgeOptions& options = {});

/// Largest L2 distance of a solver form from span(reference) after both sets
/// are orthonormalized.
double span_distance(const DiscreteHypersurface& hyp, const std::vector<DiscreteOneForm>& forms,
                     const std::vector<DiscreteOneForm>& reference);

// ---- Star and Bochner ------------------------------------------------------------

/// (*w)(e1) = -w(e2), (*w)(e2) = w(e1). Throws InvalidDimension unless n = 2.
DiscreteOneForm hodge_star_surface(const DiscreteHypersurface& hyp, const DiscreteOneForm& form);

struct BochnerReport {
  double gradient_integral = 0.0;  // int |nabla w|^2
  double ricci_integral = 0.0;     // int Ric^M(w#, w#)
  double mass = 0.0;               // int |w|^2
  double residual = 0.0;           // |sum| / mass
};

/// nabla^M w from the tangential part of R^d derivatives of w#: closed-form
/// sharp_at when present, otherwise spectral/finite differences on the grid.
BochnerReport bochner_report(const DiscreteHypersurface& hyp, const DiscreteOneForm& form);
double bochner_residual(const DiscreteHypersurface& hyp, const DiscreteOneForm& form);

/// Partial derivative along parameter axis of a node field (rows x nodes):
/// Fourier on periodic axes, polynomial interpolation through the axis nodes
/// otherwise.
Mat grid_partial(const DiscreteHypersurface& hyp, const Mat& field, int axis);

}  // namespace minidx
