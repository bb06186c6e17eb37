#include "minidx/testfns.hpp"

#include "minidx/errors.hpp"

#include <algorithm>
#include <cmath>

namespace minidx {

std::string to_string(TestMode m) {
  switch (m) {
    case TestMode::Coordinates: return "coordinates";
    case TestMode::StarCoordinates: return "star-coordinates";
    case TestMode::Wedge: return "wedge";
  }
  return "unknown";
}

TestMode test_mode_from_string(const std::string& s) {
  if (s == "coordinates") return TestMode::Coordinates;
  if (s == "star-coordinates") return TestMode::StarCoordinates;
  if (s == "wedge") return TestMode::Wedge;
  throw IncompatibleKind("unknown test-function mode '" + s + "'");
}

std::string to_string(IntegrandKind k) {
  switch (k) {
    case IntegrandKind::Coordinates: return "coordinates";
    case IntegrandKind::Wedge: return "wedge";
    case IntegrandKind::CoordinatesWithStar: return "coordinates+star";
  }
  return "unknown";
}

IntegrandKind integrand_kind_from_string(const std::string& s) {
  if (s == "coordinates") return IntegrandKind::Coordinates;
  if (s == "wedge") return IntegrandKind::Wedge;
  if (s == "coordinates+star") return IntegrandKind::CoordinatesWithStar;
  throw IncompatibleKind("unknown integrand '" + s + "'");
}

TestFunctionSet test_functions(const DiscreteHypersurface& hyp, const DiscreteOneForm& form,
                               TestMode mode, const std::optional<Mat>& axes) {
  const int d = hyp.embed_dim();
  const int nodes = hyp.node_count();
  if (form.components.rows() != hyp.dim() || form.components.cols() != nodes)
    throw InvalidDimension("form does not match the hypersurface");
  if (axes && (axes->rows() != d || axes->cols() != d))
    throw InvalidDimension("axes must be a d x d matrix");
  if (mode == TestMode::StarCoordinates && hyp.dim() != 2)
    throw InvalidDimension("star test functions need a surface");

  const DiscreteOneForm* w = &form;
  DiscreteOneForm star;
  if (mode == TestMode::StarCoordinates) {
    star = hodge_star_surface(hyp, form);
    w = &star;
  }
  Mat sharp = sharp_field(hyp, *w);
  Mat normal = hyp.normal;
  if (axes) {
    sharp = axes->transpose() * sharp;
    normal = axes->transpose() * normal;
  }

  TestFunctionSet set;
  set.mode = mode;
  if (mode == TestMode::Wedge) {
    set.values.resize(d * (d - 1) / 2, nodes);
    int row = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j, ++row) {
        set.labels.emplace_back(i, j);
        set.values.row(row) = normal.row(i).cwiseProduct(sharp.row(j)) -
                              normal.row(j).cwiseProduct(sharp.row(i));
      }
  } else {
    set.values = sharp;
    for (int i = 0; i < d; ++i) set.labels.emplace_back(i, -1);
  }
  for (int a = 0; a < nodes; ++a) {
    double r = std::abs(set.values.col(a).squaredNorm() - w->components.col(a).squaredNorm());
    set.max_norm_residual = std::max(set.max_norm_residual, r);
  }
  return set;
}

double pointwise_integrand(const DiscreteHypersurface& hyp, int node, const Vec& c,
                           IntegrandKind kind) {
  const AmbientModel& model = *hyp.ambient;
  const AmbientPoint& p = hyp.points[node];
  const Mat& e = hyp.frame[node];
  const int n = hyp.dim();
  const Vec w = e * c;
  const double w2 = c.squaredNorm();

  auto ii_sum = [&](const Vec& x) {
    double s = 0.0;
    for (int k = 0; k < n; ++k)
      s += model.second_fundamental_form_unchecked(p, Vec(e.col(k)), x).squaredNorm();
    return s;
  };

  switch (kind) {
    case IntegrandKind::Coordinates:
      return ii_sum(w) - 0.5 * scalar_curvature(model, p) * w2;
    case IntegrandKind::CoordinatesWithStar: {
      if (n != 2) throw InvalidDimension("the star integrand needs a surface");
      Vec sw = e.col(1) * c(0) - e.col(0) * c(1);
      return ii_sum(w) + ii_sum(sw) - scalar_curvature(model, p) * w2;
    }
    case IntegrandKind::Wedge: {
      const Vec nv = hyp.normal.col(node);
      double rm = 0.0;
      for (int k = 0; k < n; ++k) rm += riemann_xyxy(model, p, Vec(e.col(k)), w);
      return ii_sum(w) + ii_sum(nv) * w2 - rm - hyp.ricci_normal(node) * w2;
    }
  }
  return 0.0;
}

Mat pointwise_integrand_matrix(const DiscreteHypersurface& hyp, int node, IntegrandKind kind) {
  const int n = hyp.dim();
  Mat m(n, n);
  Vec diag(n);
  for (int i = 0; i < n; ++i) diag(i) = pointwise_integrand(hyp, node, Vec::Unit(n, i), kind);
  for (int i = 0; i < n; ++i) {
    m(i, i) = diag(i);
    for (int j = i + 1; j < n; ++j) {
      Vec c = Vec::Unit(n, i) + Vec::Unit(n, j);
      m(i, j) = m(j, i) = 0.5 * (pointwise_integrand(hyp, node, c, kind) - diag(i) - diag(j));
    }
  }
  return m;
}

double integrand_integral(const DiscreteHypersurface& hyp, const DiscreteOneForm& form,
                          IntegrandKind kind) {
  double s = 0.0;
  for (int a = 0; a < hyp.node_count(); ++a)
    s += hyp.weights(a) * pointwise_integrand(hyp, a, form.components.col(a), kind);
  return s;
}

double form_mass(const DiscreteHypersurface& hyp, const DiscreteOneForm& form) {
  return l2_inner(hyp, form, form);
}

double index_form(const SpectralSystem& system, const Vec& u, double* projection_residual) {
  if (system.discretization == Discretization::Ritz)
    return system.quadratic_form(u, projection_residual);
  const TriMesh& mesh = *system.mesh;
  Vec v = Vec::Zero(mesh.vertex_count());
  std::vector<double> ring_sum(mesh.vertex_count(), 0.0);
  std::vector<int> ring_count(mesh.vertex_count(), 0);
  for (int k = 0; k < mesh.vertex_count(); ++k)
    if (mesh.node_of_vertex[k] >= 0) v(k) = u(mesh.node_of_vertex[k]);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int a : tri) {
      if (mesh.node_of_vertex[a] >= 0) continue;
      for (int b : tri)
        if (mesh.node_of_vertex[b] >= 0) {
          ring_sum[a] += v(b);
          ++ring_count[a];
        }
    }
  }
  for (int k = 0; k < mesh.vertex_count(); ++k)
    if (ring_count[k] > 0) v(k) = ring_sum[k] / ring_count[k];
  return system.quadratic_form(v, projection_residual);
}

QIdentityReport q_identity_report(const SpectralSystem& system, const DiscreteOneForm& form,
                                 TestMode mode, double harmonic_tol,
                                 const std::optional<Mat>& axes) {
  if (!system.hyp) throw MissingStructure("spectral system has no hypersurface");
  const DiscreteHypersurface& hyp = *system.hyp;
  if (mode != TestMode::Wedge && hyp.dim() != 2)
    throw InvalidDimension("the coordinate identity is stated for surfaces only");

  QIdentityReport r;
  r.mode = mode;
  r.bochner = bochner_residual(hyp, form);
  if (!(r.bochner <= harmonic_tol))
    throw NotHarmonic("Bochner residual " + std::to_string(r.bochner) + " exceeds tolerance");

  TestFunctionSet set = test_functions(hyp, form, mode, axes);
  r.norm_residual = set.max_norm_residual;
  for (int i = 0; i < set.size(); ++i) {
    double pr = 0.0;
    r.lhs += index_form(system, set.values.row(i).transpose(), &pr);
    r.projection_residual = std::max(r.projection_residual, pr);
  }
  r.mass = form_mass(hyp, form);
  const IntegrandKind kind = mode == TestMode::Wedge ? IntegrandKind::Wedge : IntegrandKind::Coordinates;
  r.rhs = integrand_integral(hyp, form, kind);
  r.residual = r.mass > 0.0 ? std::abs(r.lhs - r.rhs) / r.mass : std::abs(r.lhs - r.rhs);
  return r;
}

double IntegrandForm::max_ratio() const {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(gram, mass);
  if (es.info() != Eigen::Success) throw IllConditionedBasis("integrand eigenproblem failed");
  return es.eigenvalues().maxCoeff();
}

IntegrandForm integrand_quadratic_form(const DiscreteHypersurface& hyp,
                                       const std::vector<DiscreteOneForm>& forms,
                                       IntegrandKind kind) {
  if (forms.empty()) throw IllConditionedBasis("empty form space");
  IntegrandForm f;
  f.kind = kind;
  f.mass = gram_matrix(hyp, forms);
  Eigen::SelfAdjointEigenSolver<Mat> es(f.mass);
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0.0) || es.eigenvalues().minCoeff() < 1e-12 * top)
    throw IllConditionedBasis("form space basis is numerically dependent");

  const int q = static_cast<int>(forms.size());
  f.gram = Mat::Zero(q, q);
  Mat comps(hyp.dim(), q);
  for (int a = 0; a < hyp.node_count(); ++a) {
    for (int i = 0; i < q; ++i) comps.col(i) = forms[i].components.col(a);
    Mat p = pointwise_integrand_matrix(hyp, a, kind);
    f.gram += hyp.weights(a) * (comps.transpose() * p * comps);
  }
  f.gram = 0.5 * (f.gram + f.gram.transpose()).eval();
  return f;
}

}  // namespace minidx
