#pragma once

// Ambient manifolds N^{n+1} with explicit isometric embeddings into R^d.
//
// Points carry both their R^d position and a model-specific "lift" (the unit
// vector z for projective models, the position itself otherwise). Tangent
// vectors are plain R^d vectors; every curvature quantity is derived from the
// second fundamental form of the embedding through the Gauss equation.

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace minidx {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

enum class AmbientKind {
  Sphere,
  RealProjective,
  ComplexProjectiveVeronese,
  QuaternionicProjectiveVeronese,
  CircleTimesSphere,
  SphereTimesSphere,
  Ellipsoid,
  GenericEmbeddedHypersurface,
};

std::string to_string(AmbientKind kind);
AmbientKind ambient_kind_from_string(const std::string& name);

struct AmbientPoint {
  Vec position;  // in R^d
  Vec lift;      // model-specific representative (see each model)
};

/// A tangent vector together with its base point.
struct TangentVectorAt {
  AmbientPoint base;
  Vec components;
};

/// Parameters for make_ambient. Which fields are read depends on the kind:
///   Sphere / RealProjective:   dims = {n+1}
///   ComplexProjectiveVeronese: dims = {m}
///   QuaternionicProjective:    dims = {p}
///   CircleTimesSphere:         dims = {n}
///   SphereTimesSphere:         dims = {p, q}
///   Ellipsoid:                 semi_axes = {a_1, ..., a_{n+2}}
///   GenericEmbedded:           dims = {n+1}, radial_height = rho on S^{n+1}
struct AmbientParams {
  std::vector<int> dims;
  std::vector<double> semi_axes;
  std::function<double(const Vec&)> radial_height;
};

class AmbientModel {
 public:
  virtual ~AmbientModel() = default;

  AmbientKind kind() const { return kind_; }
  int intrinsic_dim() const { return intrinsic_dim_; }
  int embed_dim() const { return embed_dim_; }
  const std::string& label() const { return label_; }

  /// Maps a lift to a point; throws ChartDomainError off the chart domain.
  virtual AmbientPoint point_from_lift(const Vec& lift) const = 0;
  virtual AmbientPoint random_point(Rng& rng) const = 0;

  /// d x (n+1) matrix with orthonormal columns spanning T_pN.
  virtual Mat tangent_basis(const AmbientPoint& p) const = 0;

  /// Normal part of the Euclidean second derivative; X, Y tangent at p.
  /// No tangency check here; see second_fundamental_form().
  virtual Vec second_fundamental_form_unchecked(const AmbientPoint& p, const Vec& x,
                                                const Vec& y) const = 0;

  /// A curve c on N with c(0) = p, c'(0) = x.
  virtual AmbientPoint curve(const AmbientPoint& p, const Vec& x, double t) const = 0;

  /// Distance of the chart value from the model variety.
  virtual double variety_residual(const AmbientPoint& p) const = 0;

  /// Closed-form Rm(X,Y,X,Y) when the model declares one.
  virtual std::optional<double> analytic_riemann_xyxy(const AmbientPoint&, const Vec&,
                                                      const Vec&) const {
    return std::nullopt;
  }

  /// Complex structure J X, when the model has one.
  virtual std::optional<Vec> complex_structure(const AmbientPoint&, const Vec&) const {
    return std::nullopt;
  }

  /// Push-forward of a vector v at the lift to R^d (the chart differential).
  /// For projective models v must be horizontal.
  virtual Vec lift_differential(const Vec& lift, const Vec& v) const;

  std::optional<double> einstein_constant() const { return einstein_constant_; }

  /// Sphere dimensions of a product model, empty otherwise.
  virtual std::vector<int> factor_dims() const { return {}; }

  /// Unit normal and shape operator, for hypersurface models (d = n + 2).
  virtual std::optional<Vec> outward_normal(const AmbientPoint&) const { return std::nullopt; }
  /// Shape operator in the tangent_basis() coordinates.
  virtual std::optional<Mat> shape_operator(const AmbientPoint&) const { return std::nullopt; }

  /// Checked variant: throws TangencyViolation when X or Y leaves T_pN.
  Vec second_fundamental_form(const AmbientPoint& p, const Vec& x, const Vec& y) const;

  /// |v - P_T v| / max(1, |v|).
  double tangency_residual(const AmbientPoint& p, const Vec& v) const;
  Vec project_tangent(const AmbientPoint& p, const Vec& v) const;

  Vec random_tangent(const AmbientPoint& p, Rng& rng) const;

 protected:
  AmbientModel(AmbientKind kind, int intrinsic_dim, int embed_dim, std::string label,
               std::optional<double> einstein = std::nullopt)
      : kind_(kind),
        intrinsic_dim_(intrinsic_dim),
        embed_dim_(embed_dim),
        label_(std::move(label)),
        einstein_constant_(einstein) {}

 private:
  AmbientKind kind_;
  int intrinsic_dim_;
  int embed_dim_;
  std::string label_;
  std::optional<double> einstein_constant_;
};

using AmbientPtr = std::shared_ptr<const AmbientModel>;

AmbientPtr make_ambient(AmbientKind kind, const AmbientParams& params);

// Convenience constructors.
AmbientPtr make_sphere(int dim);
AmbientPtr make_real_projective(int dim);
AmbientPtr make_cp(int m);
AmbientPtr make_hp(int p);
AmbientPtr make_circle_times_sphere(int n);
AmbientPtr make_sphere_times_sphere(int p, int q);
AmbientPtr make_ellipsoid(std::vector<double> semi_axes);
AmbientPtr make_radial_graph(int dim, std::function<double(const Vec&)> height);

// ---- Curvature from the embedding ----------------------------------------

/// Rm(X,Y,X,Y) = <II(X,X),II(Y,Y)> - |II(X,Y)|^2.
double riemann_xyxy(const AmbientModel& model, const AmbientPoint& p, const Vec& x, const Vec& y);

/// Ric(X,X), traced over an orthonormal basis of T_pN.
double ricci(const AmbientModel& model, const AmbientPoint& p, const Vec& x);

double scalar_curvature(const AmbientModel& model, const AmbientPoint& p);

/// H = trace of II, a vector normal to N in R^d.
Vec mean_curvature_vector(const AmbientModel& model, const AmbientPoint& p);

/// |II|^2 summed over an orthonormal frame.
double second_fundamental_form_norm2(const AmbientModel& model, const AmbientPoint& p);

/// Orthonormal pair spanning a random 2-plane of T_pN.
std::pair<Vec, Vec> random_orthonormal_pair(const AmbientModel& model, const AmbientPoint& p,
                                            Rng& rng);

/// Orthonormal frame of T_pN whose first vector is x/|x|. Throws
/// FrameConstructionError for x = 0.
Mat frame_completing(const AmbientModel& model, const AmbientPoint& p, const Vec& x);

// ---- Identity self-checks ---------------------------------------------------

struct IdentityReport {
  std::string model;
  int samples = 0;
  /// Maximum residual per named identity over all samples.
  std::map<std::string, double> residuals;
  /// Sampled range of sectional curvatures.
  double min_sectional = 0.0;
  double max_sectional = 0.0;
  std::optional<double> einstein_constant;

  double max_residual() const;
};

/// Runs every identity applicable to the model's kind. `seed` fixes sampling.
IdentityReport verify_model_identities(const AmbientModel& model, int sample_count,
                                       std::uint64_t seed = 0x5eed);

/// Normal projection of the second derivative of model.curve along x, by
/// central differences with one Richardson level. Test oracle for II(X,X).
Vec second_fundamental_form_fd(const AmbientModel& model, const AmbientPoint& p, const Vec& x,
                               double step);

}  // namespace minidx
