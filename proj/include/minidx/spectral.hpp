#pragma once

// The index form Q(phi) = int |grad phi|^2 - (Ric(N,N) + |A|^2) phi^2 as a
// symmetric generalized eigenproblem.
//
// Two discretizations share one interface:
//   Ritz  Rayleigh-Ritz on restrictions of ambient polynomials of degree <= L,
//         integrated with the mesh quadrature (default; exact on the catalog
//         spectra whose eigenfunctions are such restrictions).
//   P1    nodal piecewise-linear elements on the triangulated mesh with
//         consistent mass (two-dimensional meshes only).

#include "minidx/eigensolve.hpp"
#include "minidx/hypersurface.hpp"
#include "minidx/trimesh.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace minidx {

enum class Discretization { Ritz, P1 };
enum class ParityRestriction { None, Even, Odd };

std::string to_string(Discretization d);
std::string to_string(ParityRestriction p);

struct SpectralOptions {
  Discretization discretization = Discretization::Ritz;
  int basis_degree = 4;
  ParityRestriction parity = ParityRestriction::None;
  double rank_tolerance = 1e-9;  // relative singular-value cutoff of the Ritz basis
};

class SpectralSystem {
 public:
  Discretization discretization = Discretization::Ritz;
  ParityRestriction parity = ParityRestriction::None;
  const DiscreteHypersurface* hyp = nullptr;

  // Ritz: coefficient space of a mass-orthonormal basis.
  Mat basis;      // nodes x m, node values
  Mat stiffness;  // m x m
  Mat potential;  // m x m
  Mat mass;       // m x m (identity up to rounding)
  int raw_basis_size = 0;

  // P1: vertex space of the triangulation.
  std::shared_ptr<const TriMesh> mesh;
  SpMat stiffness_sparse;
  SpMat potential_sparse;
  SpMat mass_sparse;

  int size() const;

  /// Q(u, u) for a node function u. For Ritz, u is first projected onto the
  /// basis (W-orthogonally); the relative L2 projection residual is written to
  /// *projection_residual. For P1, u must be given on the vertices.
  double quadratic_form(const Vec& u, double* projection_residual = nullptr) const;
  /// int u^2 in the same discretization.
  double mass_form(const Vec& u) const;
  /// Q(u,u) / int u^2.
  double rayleigh_quotient(const Vec& u) const;
};

/// Builds the system; throws MissingStructure without geometry fields.
SpectralSystem assemble_jacobi(const DiscreteHypersurface& hyp, const SpectralOptions& options = {});

struct SpectrumReport {
  Vec eigenvalues;            // ascending
  Vec residuals;              // |(K-P)x - lambda M x| / |x|
  std::vector<int> clusters;  // multiplicity cluster id per eigenvalue
  Mat eigenvectors;           // coefficient (Ritz) or vertex (P1) vectors
  int morse_index = 0;
  bool complete = false;      // true when the whole discrete spectrum was computed

  /// #{lambda_k < eta}, strict. A window of 1e-8 max(1,|eta|) below eta
  /// absorbs rounding so that an analytic eigenvalue equal to eta is not counted.
  int count_below(double eta) const;
  /// Sizes of the clusters in order.
  std::vector<int> multiplicities() const;
};

/// Relative gap used to group eigenvalues into multiplicity clusters.
inline constexpr double kClusterGap = 1e-3;

SpectrumReport spectrum(const SpectralSystem& system, int how_many);

/// CSV with columns index,eigenvalue,residual,cluster.
void write_spectrum_csv(std::ostream& out, const SpectrumReport& report);

/// Node values of the Ritz basis monomials before orthonormalization.
Mat ambient_monomials(const DiscreteHypersurface& hyp, int degree, ParityRestriction parity);

}  // namespace minidx
