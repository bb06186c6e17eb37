#include "minidx/hodge.hpp"

#include "minidx/errors.hpp"
#include "minidx/numdiff.hpp"

#include <algorithm>
#include <cmath>

namespace minidx {

namespace {

constexpr double kChartStep = 1e-3;

using Triplets = std::vector<Eigen::Triplet<double>>;

SpMat from_triplets(int rows, int cols, const Triplets& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Differentiation matrix on the nodes of one axis.
Mat axis_derivative_matrix(const ParamAxis& axis) {
  const int n = axis.size();
  Mat dm = Mat::Zero(n, n);
  if (axis.kind == AxisKind::Periodic) {
    const double h = 2.0 * M_PI / n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double x = 0.5 * (i - j) * h;
        const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
        dm(i, j) = n % 2 == 0 ? 0.5 * sign / std::tan(x) : 0.5 * sign / std::sin(x);
      }
    return dm;
  }
  // Barycentric Lagrange interpolation through all nodes.
  const Vec& x = axis.nodes;
  Vec w = Vec::Ones(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) w(j) /= (x(j) - x(k));
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      dm(i, j) = (w(j) / w(i)) / (x(i) - x(j));
      diag -= dm(i, j);
    }
    dm(i, i) = diag;
  }
  return dm;
}

}  // namespace

std::string to_string(FormProvenance p) {
  switch (p) {
    case FormProvenance::AnalyticCatalog: return "analytic";
    case FormProvenance::HodgeSolver: return "hodge-solver";
    case FormProvenance::Probe: return "probe";
  }
  return "unknown";
}

Mat sharp_field(const DiscreteHypersurface& hyp, const DiscreteOneForm& form) {
  Mat out(hyp.embed_dim(), hyp.node_count());
  for (int a = 0; a < hyp.node_count(); ++a) out.col(a) = form.sharp(hyp, a);
  return out;
}

FrameAt frame_at(const DiscreteHypersurface& hyp, const Vec& t) {
  const int n = hyp.dim();
  const int d = hyp.embed_dim();
  auto pos = [&](const Vec& s) -> Vec { return hyp.point_at(s).position; };
  FrameAt f;
  f.jacobian = numdiff::jacobian(pos, t, kChartStep);
  f.frame.resize(d, n);
  Mat r = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    Vec v = f.jacobian.col(k);
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < k; ++j) {
        double c = f.frame.col(j).dot(v);
        r(j, k) += c;
        v -= c * f.frame.col(j);
      }
    r(k, k) = v.norm();
    if (!(r(k, k) > 1e-12)) throw FrameDegeneracy("chart Jacobian loses rank", {});
    f.frame.col(k) = v / r(k, k);
  }
  f.frame_to_param = r.triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
  return f;
}

DiscreteOneForm coordinate_form(const DiscreteHypersurface& hyp, int axis) {
  if (axis < 0 || axis >= hyp.dim()) throw InvalidDimension("no parameter axis " + std::to_string(axis));
  if (hyp.axes[axis].kind != AxisKind::Periodic)
    throw IncompatibleKind("coordinate forms need a periodic axis");
  DiscreteOneForm f;
  f.label = "dt" + std::to_string(axis);
  f.provenance = FormProvenance::AnalyticCatalog;
  f.components.resize(hyp.dim(), hyp.node_count());
  for (int a = 0; a < hyp.node_count(); ++a)
    f.components.col(a) = hyp.frame_to_param[a].row(axis).transpose();
  const DiscreteHypersurface* h = &hyp;
  f.sharp_at = [h, axis](const Vec& t) -> Vec {
    FrameAt fr = frame_at(*h, t);
    return fr.frame * fr.frame_to_param.row(axis).transpose();
  };
  return f;
}

DiscreteOneForm exact_form(const DiscreteHypersurface& hyp, const Vec& a) {
  if (a.size() != hyp.embed_dim()) throw InvalidDimension("exact form needs an R^d vector");
  DiscreteOneForm f;
  f.label = "d(a.x)";
  f.provenance = FormProvenance::Probe;
  f.components.resize(hyp.dim(), hyp.node_count());
  for (int k = 0; k < hyp.node_count(); ++k) f.components.col(k) = hyp.frame[k].transpose() * a;
  const DiscreteHypersurface* h = &hyp;
  f.sharp_at = [h, a](const Vec& t) -> Vec {
    FrameAt fr = frame_at(*h, t);
    return fr.frame * (fr.frame.transpose() * a);
  };
  return f;
}

DiscreteOneForm zero_form(const DiscreteHypersurface& hyp) {
  DiscreteOneForm f;
  f.label = "zero";
  f.components = Mat::Zero(hyp.dim(), hyp.node_count());
  const int d = hyp.embed_dim();
  f.sharp_at = [d](const Vec&) -> Vec { return Vec::Zero(d); };
  return f;
}

DiscreteOneForm combine(const std::vector<DiscreteOneForm>& forms, const Vec& coeffs) {
  if (forms.empty() || static_cast<int>(forms.size()) != coeffs.size())
    throw InvalidDimension("combine needs one coefficient per form");
  DiscreteOneForm out;
  out.provenance = forms.front().provenance;
  out.components = Mat::Zero(forms.front().components.rows(), forms.front().components.cols());
  bool analytic = true;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    out.components += coeffs(i) * forms[i].components;
    analytic = analytic && static_cast<bool>(forms[i].sharp_at);
    if (forms[i].provenance != out.provenance) out.provenance = FormProvenance::Probe;
  }
  out.label = "combination";
  if (analytic) {
    std::vector<std::function<Vec(const Vec&)>> parts;
    for (const auto& f : forms) parts.push_back(f.sharp_at);
    out.sharp_at = [parts, coeffs](const Vec& t) -> Vec {
      Vec s = coeffs(0) * parts[0](t);
      for (std::size_t i = 1; i < parts.size(); ++i) s += coeffs(i) * parts[i](t);
      return s;
    };
  }
  return out;
}

double l2_inner(const DiscreteHypersurface& hyp, const DiscreteOneForm& a, const DiscreteOneForm& b) {
  return (a.components.cwiseProduct(b.components).colwise().sum().transpose().array() *
          hyp.weights.array())
      .sum();
}

Mat gram_matrix(const DiscreteHypersurface& hyp, const std::vector<DiscreteOneForm>& forms) {
  const int m = static_cast<int>(forms.size());
  Mat g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) g(i, j) = g(j, i) = l2_inner(hyp, forms[i], forms[j]);
  return g;
}

std::vector<DiscreteOneForm> orthonormalize(const DiscreteHypersurface& hyp,
                                            const std::vector<DiscreteOneForm>& forms) {
  if (forms.empty()) return {};
  Mat g = gram_matrix(hyp, forms);
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0.0) || es.eigenvalues().minCoeff() < 1e-12 * top)
    throw IllConditionedBasis("forms are numerically linearly dependent");
  Eigen::LLT<Mat> llt(g);
  // Gram-Schmidt order: new = old * L^{-T}.
  Mat c = llt.matrixU().solve(Mat::Identity(g.rows(), g.cols()));
  std::vector<DiscreteOneForm> out;
  for (int j = 0; j < c.cols(); ++j) {
    DiscreteOneForm f = combine(forms, c.col(j));
    f.label = forms[j].label;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<DiscreteOneForm> catalog_harmonic_forms(const DiscreteHypersurface& hyp) {
  std::vector<int> axes;
  switch (hyp.kind) {
    case CatalogKind::CliffordTorus: axes = {0, 1}; break;
    case CatalogKind::GeneralizedClifford:
    case CatalogKind::CircleTimesEquator:
      axes = hyp.dim() == 2 ? std::vector<int>{0, 1} : std::vector<int>{0};
      break;
    default: break;
  }
  std::vector<DiscreteOneForm> out;
  for (int a : axes) out.push_back(coordinate_form(hyp, a));
  return out;
}

// ---------------------------------------------------------------------------

HodgeLaplacian assemble_hodge_laplacian(const DiscreteHypersurface& hyp) {
  HodgeLaplacian h;
  auto mesh = std::make_shared<TriMesh>(triangulate(hyp));
  h.mesh = mesh;
  const int nv = mesh->vertex_count(), ne = mesh->edge_count(), nt = mesh->triangle_count();

  Triplets d0, d1, m0, m1, m2;
  for (int e = 0; e < ne; ++e) {
    d0.emplace_back(e, mesh->edges[e][0], -1.0);
    d0.emplace_back(e, mesh->edges[e][1], 1.0);
  }
  Vec vertex_area = Vec::Zero(nv);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh->triangles[t];
    const double area = mesh->area(t);
    if (!(area > 0.0)) throw ResolutionTooSmall("degenerate triangle in the mesh");
    for (int k = 0; k < 3; ++k) {
      d1.emplace_back(t, mesh->triangle_edges[t][k], mesh->triangle_edge_signs[t][k]);
      vertex_area(tri[k]) += area / 3.0;
    }
    m2.emplace_back(t, t, 1.0 / area);

    // Barycentric gradient inner products from the Gram matrix of the edge vectors.
    Vec u = mesh->vertices.col(tri[1]) - mesh->vertices.col(tri[0]);
    Vec v = mesh->vertices.col(tri[2]) - mesh->vertices.col(tri[0]);
    Eigen::Matrix2d g;
    g << u.dot(u), u.dot(v), u.dot(v), v.dot(v);
    Eigen::Matrix2d gi = g.inverse();
    Eigen::Matrix3d gg;  // <grad l_i, grad l_j>
    gg(1, 1) = gi(0, 0);
    gg(1, 2) = gg(2, 1) = gi(0, 1);
    gg(2, 2) = gi(1, 1);
    gg(0, 1) = gg(1, 0) = -gi(0, 0) - gi(0, 1);
    gg(0, 2) = gg(2, 0) = -gi(0, 1) - gi(1, 1);
    gg(0, 0) = gi(0, 0) + 2.0 * gi(0, 1) + gi(1, 1);
    auto ll = [&](int i, int j) { return area * (i == j ? 2.0 : 1.0) / 12.0; };

    // Local edge k runs from local vertex k to k+1; W = l_i grad l_j - l_j grad l_i.
    for (int p = 0; p < 3; ++p) {
      const int i = p, j = (p + 1) % 3;
      for (int q = 0; q < 3; ++q) {
        const int k = q, l = (q + 1) % 3;
        double val = ll(i, k) * gg(j, l) - ll(i, l) * gg(j, k) - ll(j, k) * gg(i, l) +
                     ll(j, l) * gg(i, k);
        val *= mesh->triangle_edge_signs[t][p] * mesh->triangle_edge_signs[t][q];
        m1.emplace_back(mesh->triangle_edges[t][p], mesh->triangle_edges[t][q], val);
      }
    }
  }
  Triplets m0inv;
  for (int v = 0; v < nv; ++v) {
    m0.emplace_back(v, v, vertex_area(v));
    m0inv.emplace_back(v, v, 1.0 / vertex_area(v));
  }
  h.d0 = from_triplets(ne, nv, d0);
  h.d1 = from_triplets(nt, ne, d1);
  h.m0 = from_triplets(nv, nv, m0);
  h.m1 = from_triplets(ne, ne, m1);
  h.m2 = from_triplets(nt, nt, m2);
  SpMat m0i = from_triplets(nv, nv, m0inv);
  SpMat md = h.m1 * h.d0;
  SpMat curl = SpMat(h.d1.transpose()) * h.m2 * h.d1;
  SpMat div = md * m0i * SpMat(md.transpose());
  h.laplacian = curl + div;
  h.laplacian.prune(0.0);
  return h;
}

Vec HodgeLaplacian::cochain(const std::function<Vec(const Vec&)>& param_covector) const {
  Vec a(mesh->edge_count());
  for (int e = 0; e < mesh->edge_count(); ++e) {
    const int i = mesh->edges[e][0], j = mesh->edges[e][1];
    Eigen::Vector2d delta = mesh->param_delta(i, j);
    // Pole vertices carry no azimuth: edges into a pole are meridians.
    if (mesh->node_of_vertex[i] < 0 || mesh->node_of_vertex[j] < 0) delta(1) = 0.0;
    Eigen::Vector2d start = mesh->vertex_param.col(i);
    if (mesh->node_of_vertex[i] < 0) start(1) = mesh->vertex_param(1, j);
    Vec mid = start + 0.5 * delta;
    a(e) = param_covector(mid).dot(delta);
  }
  return a;
}

double HodgeLaplacian::residual(const Vec& c) const {
  const double denom = (m1 * c).norm();
  if (!(denom > 0.0)) return 0.0;
  return (laplacian * c).norm() / denom;
}

namespace {

// Node components of a form from its edge cochain: a constant parameter
// covector per triangle, averaged at nodes with area weights.
Mat cochain_to_components(const DiscreteHypersurface& hyp, const TriMesh& mesh, const Vec& a) {
  const int nodes = hyp.node_count();
  Mat cov = Mat::Zero(2, nodes);
  Vec wsum = Vec::Zero(nodes);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (mesh.touches_pole[t]) continue;
    Eigen::Matrix<double, 3, 2> lhs;
    Eigen::Vector3d rhs;
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.triangle_edges[t][k];
      lhs.row(k) = mesh.param_delta(mesh.edges[e][0], mesh.edges[e][1]).transpose();
      rhs(k) = a(e);
    }
    Eigen::Vector2d c = lhs.colPivHouseholderQr().solve(rhs);
    const double area = mesh.area(t);
    for (int v : mesh.triangles[t]) {
      const int node = mesh.node_of_vertex[v];
      if (node < 0) continue;
      cov.col(node) += area * c;
      wsum(node) += area;
    }
  }
  Mat comps(2, nodes);
  for (int k = 0; k < nodes; ++k) {
    Vec c = cov.col(k) / wsum(k);
    comps.col(k) = hyp.frame_to_param[k].transpose() * c;
  }
  return comps;
}

}  // namespace

HodgeResult harmonic_one_forms(const DiscreteHypersurface& hyp, const HodgeOptions& options) {
  HodgeResult res;
  res.expected_betti = hyp.chart.betti1;
  if (hyp.dim() != 2) {
    res.basis = orthonormalize(hyp, catalog_harmonic_forms(hyp));
    res.kernel_dimension = static_cast<int>(res.basis.size());
    res.unexpected_kernel = res.kernel_dimension != res.expected_betti;
    return res;
  }
  res.from_solver = true;
  HodgeLaplacian h = assemble_hodge_laplacian(hyp);
  const int want = std::min<int>(res.expected_betti + options.extra_eigenvalues,
                                 h.mesh->edge_count() - 1);
  ShiftInvertOptions so;
  so.shift = options.shift;
  so.required = std::max(1, res.expected_betti);
  EigenPairs ep = sparse_lowest(h.laplacian, h.m1, want, so);
  res.eigenvalues = ep.values;
  const double ref = std::abs(ep.values(ep.values.size() - 1));
  std::vector<DiscreteOneForm> found;
  for (int i = 0; i < ep.values.size(); ++i) {
    if (!(std::abs(ep.values(i)) * options.gap < ref)) continue;
    if (ep.residuals(i) > 1e-6 * std::max(1.0, ref))
      throw SolverFailure("harmonic form did not converge", ep.residuals(i));
    Vec a = ep.vectors.col(i);
    res.max_closedness = std::max(res.max_closedness, (h.d1 * a).norm() / a.norm());
    Vec ma = h.m1 * a;
    res.max_coclosedness =
        std::max(res.max_coclosedness, (SpMat(h.d0.transpose()) * ma).norm() / ma.norm());
    DiscreteOneForm f;
    f.label = "harmonic" + std::to_string(found.size());
    f.provenance = FormProvenance::HodgeSolver;
    f.components = cochain_to_components(hyp, *h.mesh, a);
    found.push_back(std::move(f));
  }
  res.kernel_dimension = static_cast<int>(found.size());
  res.unexpected_kernel = res.kernel_dimension != res.expected_betti;
  res.basis = orthonormalize(hyp, found);
  for (auto& f : res.basis) f.provenance = FormProvenance::HodgeSolver;
  return res;
}

double span_distance(const DiscreteHypersurface& hyp, const std::vector<DiscreteOneForm>& forms,
                     const std::vector<DiscreteOneForm>& reference) {
  auto a = orthonormalize(hyp, forms);
  auto b = orthonormalize(hyp, reference);
  double worst = 0.0;
  for (const auto& f : a) {
    Mat r = f.components;
    for (const auto& g : b) r -= l2_inner(hyp, f, g) * g.components;
    double n2 = (r.colwise().squaredNorm().transpose().array() * hyp.weights.array()).sum();
    worst = std::max(worst, std::sqrt(std::max(0.0, n2)));
  }
  return worst;
}

// ---------------------------------------------------------------------------

DiscreteOneForm hodge_star_surface(const DiscreteHypersurface& hyp, const DiscreteOneForm& form) {
  if (hyp.dim() != 2) throw InvalidDimension("the surface Hodge star needs n = 2");
  DiscreteOneForm out;
  out.label = "*" + form.label;
  out.provenance = form.provenance;
  out.components.resize(2, hyp.node_count());
  out.components.row(0) = -form.components.row(1);
  out.components.row(1) = form.components.row(0);
  if (form.sharp_at) {
    const DiscreteHypersurface* h = &hyp;
    auto inner = form.sharp_at;
    out.sharp_at = [h, inner](const Vec& t) -> Vec {
      FrameAt fr = frame_at(*h, t);
      Vec c = fr.frame.transpose() * inner(t);
      return fr.frame.col(1) * c(0) - fr.frame.col(0) * c(1);
    };
  }
  return out;
}

Mat grid_partial(const DiscreteHypersurface& hyp, const Mat& field, int axis) {
  if (field.cols() != hyp.node_count()) throw InvalidDimension("field needs one column per node");
  const Mat dm = axis_derivative_matrix(hyp.axes[axis]);
  const int m = hyp.axes[axis].size();
  Mat out = Mat::Zero(field.rows(), field.cols());
  for (int a = 0; a < hyp.node_count(); ++a) {
    std::vector<int> multi = hyp.node_multi_index(a);
    if (multi[axis] != 0) continue;  // visit each line once
    std::vector<int> line(m);
    for (int i = 0; i < m; ++i) {
      multi[axis] = i;
      line[i] = hyp.node_index(multi);
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (dm(i, j) != 0.0) out.col(line[i]) += dm(i, j) * field.col(line[j]);
  }
  return out;
}

BochnerReport bochner_report(const DiscreteHypersurface& hyp, const DiscreteOneForm& form) {
  const int n = hyp.dim();
  const int nodes = hyp.node_count();
  std::vector<Mat> partials;
  if (!form.sharp_at) {
    Mat s = sharp_field(hyp, form);
    for (int a = 0; a < n; ++a) partials.push_back(grid_partial(hyp, s, a));
  }
  BochnerReport r;
  for (int k = 0; k < nodes; ++k) {
    const Mat& e = hyp.frame[k];
    Mat dw;  // d x n, D_{e_j} w#
    if (form.sharp_at) {
      dw = hyp.frame_derivative(k, form.sharp_at);
    } else {
      Mat dp(hyp.embed_dim(), n);
      for (int a = 0; a < n; ++a) dp.col(a) = partials[a].col(k);
      dw = dp * hyp.frame_to_param[k];
    }
    const double w = hyp.weights(k);
    r.gradient_integral += w * (e.transpose() * dw).squaredNorm();
    Vec c = form.components.col(k);
    double ric = 0.0;
    for (int j = 0; j < n; ++j) ric += gauss_riemann(hyp, k, c, Vec::Unit(n, j));
    r.ricci_integral += w * ric;
    r.mass += w * c.squaredNorm();
  }
  const double total = r.gradient_integral + r.ricci_integral;
  r.residual = r.mass > 0.0 ? std::abs(total) / r.mass : std::abs(total);
  return r;
}

double bochner_residual(const DiscreteHypersurface& hyp, const DiscreteOneForm& form) {
  return bochner_report(hyp, form).residual;
}

}  // namespace minidx
