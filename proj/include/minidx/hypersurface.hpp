#pragma once

// Catalog minimal hypersurfaces M^n in an ambient model, sampled on tensor
// product quadrature grids. Every geometric field is evaluated from the
// analytic parametrization; only derivatives are taken numerically.

#include "minidx/ambient.hpp"
#include "minidx/quadrature.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace minidx {

enum class CatalogKind {
  EquatorInSphere,      // S^n in S^{n+1}, n = 2, 3
  CliffordTorus,        // S^1(1/sqrt2) x S^1(1/sqrt2) in S^3
  GeneralizedClifford,  // S^1(r) x S^{n-1}(s) in S^{n+1}, r = 1/sqrt(n), n = 2..4
  CircleTimesEquator,   // S^1 x S^{n-1} in S^1 x S^n, n = 2..4
  GeodesicSphereCP,     // distance sphere of radius r about [1:0:0] in CP^2
  EllipsoidSection,     // {x_i = 0} in a 3-dimensional ellipsoid of R^4
};

std::string to_string(CatalogKind kind);
CatalogKind catalog_kind_from_string(const std::string& name);

struct CatalogParams {
  int n = 2;              // dimension of M where the kind has a family
  double radius = 0.0;    // GeodesicSphereCP; 0 selects the minimal radius
  int axis_index = 0;     // EllipsoidSection
};

/// Analytic parametrization of a catalog hypersurface.
struct HypersurfaceChart {
  int dim = 0;
  std::vector<AxisKind> axes;
  std::function<Vec(const Vec&)> lift;    // ambient lift at parameter t
  std::function<Vec(const Vec&)> normal;  // unit normal N in R^d at t
  std::optional<double> volume;           // analytic volume when known
  int betti1 = 0;
  bool antipodal_invariant = false;       // node set closed under x -> -x
};

/// Per-node geometry of a hypersurface.
class DiscreteHypersurface {
 public:
  AmbientPtr ambient;
  CatalogKind kind{};
  CatalogParams params;
  std::vector<int> resolution;
  std::vector<ParamAxis> axes;
  HypersurfaceChart chart;

  Mat param;                      // n x nodes
  std::vector<AmbientPoint> points;
  Vec weights;                    // quadrature weights, sum = vol(M)
  Mat normal;                     // d x nodes
  std::vector<Mat> jacobian;      // d x n, dX/dt
  std::vector<Mat> frame;         // d x n, orthonormal e_1..e_n
  std::vector<Mat> frame_to_param;  // n x n, e = jacobian * frame_to_param
  std::vector<Mat> shape;         // n x n, A_jk = -<D_{e_j} N, e_k>, symmetrized
  Vec shape_norm2;                // |A|^2
  Vec ricci_normal;               // Ric^N(N, N)
  Vec potential;                  // Ric^N(N, N) + |A|^2
  Vec mean_curvature;             // tr A
  double max_shape_asymmetry = 0.0;
  double max_normal_residual = 0.0;  // max |<N,e_k>| and ||N| - 1|

  int dim() const { return static_cast<int>(param.rows()); }
  int embed_dim() const { return ambient->embed_dim(); }
  int node_count() const { return static_cast<int>(param.cols()); }
  const Vec& position(int a) const { return points[a].position; }

  double volume() const { return weights.sum(); }
  double mean_curvature_residual() const { return mean_curvature.cwiseAbs().maxCoeff(); }

  int node_index(const std::vector<int>& multi) const;
  std::vector<int> node_multi_index(int node) const;

  AmbientPoint point_at(const Vec& t) const { return ambient->point_from_lift(chart.lift(t)); }

  /// Columns D_{e_j} F at node a for an R^k-valued function F of the
  /// parameters, by central differences in parameter space.
  Mat frame_derivative(int node, const std::function<Vec(const Vec&)>& f) const;

  /// Plain-text node table: id, params..., position..., weight, |A|^2, potential.
  void dump(std::ostream& out) const;
};

/// Default per-axis resolution for a kind, before scaling.
std::vector<int> default_resolution(CatalogKind kind, const CatalogParams& params);

/// Root of the homogeneous mean-curvature function 2 cot(2r) + (2m-2) cot(r)
/// on (pi/4, pi/2), by bisection to `tol`.
double geodesic_sphere_minimal_radius(int m, double tol = 1e-12);

HypersurfaceChart make_chart(const AmbientModel& ambient, CatalogKind kind,
                             const CatalogParams& params);

DiscreteHypersurface build_hypersurface(AmbientPtr ambient, CatalogKind kind,
                                        const CatalogParams& params,
                                        const std::vector<int>& resolution);

// ---- Intrinsic curvature of M through its own embedding in R^d ------------

/// Rm^M(e_i, e_j, e_i, e_j) at a node, from the normal part (relative to M in
/// R^d) of second derivatives of the chart. Independent of II and A.
Mat intrinsic_sectional(const DiscreteHypersurface& hyp, int node);

/// Ric^M(U, U) for U = sum u_k e_k, from intrinsic_sectional-style data.
double intrinsic_ricci(const DiscreteHypersurface& hyp, int node, const Vec& u_frame);

/// Rm^M(X,Y,X,Y) predicted by the Gauss equation of M in N (frame components).
double gauss_riemann(const DiscreteHypersurface& hyp, int node, const Vec& x, const Vec& y);

// ---- Antipodal double cover -------------------------------------------------

enum class Parity { Even, Odd, Neither };
std::string to_string(Parity p);

struct DoubleCoverLift {
  const DiscreteHypersurface* base = nullptr;
  std::vector<int> partner;  // node of -x
  /// Max over paired nodes of |N(-x) + N(x)|.
  double normal_oddness = 0.0;

  Parity classify(const Vec& field, double tol = 1e-10) const;
  /// Values on one representative per antipodal pair (the node with the
  /// smaller id). Throws IncompatibleKind for fields that are not even.
  Vec descend_field(const Vec& field, double tol = 1e-10) const;
  std::vector<int> representatives() const;
};

/// Pairs x with -x; throws MeshNotSymmetric when some node has no partner.
DoubleCoverLift lift_to_double_cover(const DiscreteHypersurface& hyp, double tol = 1e-9);

}  // namespace minidx
