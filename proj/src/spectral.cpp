#include "minidx/spectral.hpp"

#include "minidx/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

namespace minidx {

std::string to_string(Discretization d) {
  return d == Discretization::Ritz ? "ritz" : "p1";
}

std::string to_string(ParityRestriction p) {
  switch (p) {
    case ParityRestriction::None: return "none";
    case ParityRestriction::Even: return "even";
    case ParityRestriction::Odd: return "odd";
  }
  return "unknown";
}

namespace {

std::vector<std::vector<int>> exponents(int d, int degree, ParityRestriction parity) {
  std::vector<std::vector<int>> out;
  std::vector<int> alpha(d, 0);
  // Enumerate all multi-indices with |alpha| <= degree, ordered by total degree.
  for (int total = 0; total <= degree; ++total) {
    if (parity == ParityRestriction::Even && total % 2 != 0) continue;
    if (parity == ParityRestriction::Odd && total % 2 == 0) continue;
    std::function<void(int, int)> rec = [&](int i, int left) {
      if (i == d - 1) {
        alpha[i] = left;
        out.push_back(alpha);
        return;
      }
      for (int k = left; k >= 0; --k) {
        alpha[i] = k;
        rec(i + 1, left - k);
      }
    };
    rec(0, total);
  }
  return out;
}

struct MonomialTable {
  Mat values;              // nodes x m
  std::vector<Mat> grads;  // per frame direction k: nodes x m, <grad m_j, e_k>
};

MonomialTable monomial_table(const DiscreteHypersurface& hyp, int degree,
                             ParityRestriction parity, bool with_gradients) {
  const int d = hyp.embed_dim();
  const int n = hyp.dim();
  const int nodes = hyp.node_count();
  auto alpha = exponents(d, degree, parity);
  const int m = static_cast<int>(alpha.size());
  MonomialTable t;
  t.values.resize(nodes, m);
  if (with_gradients) t.grads.assign(n, Mat(nodes, m));
  Mat pw(d, degree + 1);
  Vec grad(d);
  for (int a = 0; a < nodes; ++a) {
    const Vec& x = hyp.position(a);
    for (int i = 0; i < d; ++i) {
      pw(i, 0) = 1.0;
      for (int k = 1; k <= degree; ++k) pw(i, k) = pw(i, k - 1) * x(i);
    }
    for (int j = 0; j < m; ++j) {
      const auto& al = alpha[j];
      double v = 1.0;
      for (int i = 0; i < d; ++i) v *= pw(i, al[i]);
      t.values(a, j) = v;
      if (!with_gradients) continue;
      for (int i = 0; i < d; ++i) {
        if (al[i] == 0) {
          grad(i) = 0.0;
          continue;
        }
        double g = al[i] * pw(i, al[i] - 1);
        for (int l = 0; l < d; ++l)
          if (l != i) g *= pw(l, al[l]);
        grad(i) = g;
      }
      for (int k = 0; k < n; ++k) t.grads[k](a, j) = grad.dot(hyp.frame[a].col(k));
    }
  }
  return t;
}

void check_geometry(const DiscreteHypersurface& hyp) {
  if (hyp.node_count() == 0 || hyp.potential.size() != hyp.node_count() ||
      hyp.frame.size() != static_cast<std::size_t>(hyp.node_count()))
    throw MissingStructure("hypersurface geometry fields are not available");
}

SpectralSystem assemble_ritz(const DiscreteHypersurface& hyp, const SpectralOptions& opt) {
  if (opt.basis_degree < 0) throw InvalidDimension("basis degree must be >= 0");
  MonomialTable t = monomial_table(hyp, opt.basis_degree, opt.parity, true);
  const Vec& w = hyp.weights;
  const Vec sw = w.cwiseSqrt();

  Eigen::BDCSVD<Mat> svd(sw.asDiagonal() * t.values, Eigen::ComputeThinV);
  const Vec& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) == 0.0) throw IllConditionedBasis("empty Ritz basis");
  int rank = 0;
  while (rank < sigma.size() && sigma(rank) > opt.rank_tolerance * sigma(0)) ++rank;
  Mat transform = svd.matrixV().leftCols(rank) * sigma.head(rank).cwiseInverse().asDiagonal();

  SpectralSystem sys;
  sys.discretization = Discretization::Ritz;
  sys.parity = opt.parity;
  sys.hyp = &hyp;
  sys.raw_basis_size = static_cast<int>(t.values.cols());
  sys.basis = t.values * transform;
  Mat wb = w.asDiagonal() * sys.basis;
  sys.mass = sys.basis.transpose() * wb;
  sys.potential = sys.basis.transpose() * (hyp.potential.asDiagonal() * wb);
  sys.stiffness = Mat::Zero(rank, rank);
  for (const Mat& g : t.grads) {
    Mat gt = g * transform;
    sys.stiffness += gt.transpose() * (w.asDiagonal() * gt);
  }
  auto sym = [](Mat& m) { m = 0.5 * (m + m.transpose()).eval(); };
  sym(sys.mass);
  sym(sys.potential);
  sym(sys.stiffness);
  return sys;
}

/// int over a triangle of lambda_i lambda_j lambda_l, divided by the area.
double triple_barycentric(int i, int j, int l) {
  if (i == j && j == l) return 1.0 / 10.0;
  if (i == j || j == l || i == l) return 1.0 / 30.0;
  return 1.0 / 60.0;
}

SpectralSystem assemble_p1(const DiscreteHypersurface& hyp, const SpectralOptions& opt) {
  if (hyp.dim() != 2) throw InvalidDimension("P1 elements are implemented for surfaces only");
  if (opt.parity != ParityRestriction::None)
    throw IncompatibleKind("parity restriction is available with the Ritz discretization");
  auto mesh = std::make_shared<TriMesh>(triangulate(hyp));
  const int nv = mesh->vertex_count();

  // Vertex potential; pole vertices take the mean of their ring.
  Vec vpot = Vec::Zero(nv);
  Vec ring_count = Vec::Zero(nv);
  for (int v = 0; v < nv; ++v)
    if (mesh->node_of_vertex[v] >= 0) vpot(v) = hyp.potential(mesh->node_of_vertex[v]);
  for (int t = 0; t < mesh->triangle_count(); ++t) {
    if (!mesh->touches_pole[t]) continue;
    const auto& tri = mesh->triangles[t];
    int pole = tri[0];
    for (int k = 1; k < 3; ++k) {
      vpot(pole) += hyp.potential(mesh->node_of_vertex[tri[k]]);
      ring_count(pole) += 1.0;
    }
  }
  for (int v = 0; v < nv; ++v)
    if (ring_count(v) > 0) vpot(v) /= ring_count(v);

  std::vector<Eigen::Triplet<double>> kt, pt, mt;
  for (int t = 0; t < mesh->triangle_count(); ++t) {
    const auto& tri = mesh->triangles[t];
    const double area = mesh->area(t);
    if (!(area > 0.0)) throw FrameDegeneracy("degenerate triangle", {tri[0], tri[1], tri[2]});
    for (int k = 0; k < 3; ++k) {
      int i = tri[(k + 1) % 3], j = tri[(k + 2) % 3], o = tri[k];
      Vec a = mesh->vertices.col(i) - mesh->vertices.col(o);
      Vec b = mesh->vertices.col(j) - mesh->vertices.col(o);
      double cot = a.dot(b) / (2.0 * area);
      double c = 0.5 * cot;
      kt.emplace_back(i, j, -c);
      kt.emplace_back(j, i, -c);
      kt.emplace_back(i, i, c);
      kt.emplace_back(j, j, c);
    }
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        mt.emplace_back(tri[p], tri[q], area * (p == q ? 2.0 : 1.0) / 12.0);
        double v = 0.0;
        for (int l = 0; l < 3; ++l) v += vpot(tri[l]) * triple_barycentric(p, q, l);
        pt.emplace_back(tri[p], tri[q], area * v);
      }
  }
  SpectralSystem sys;
  sys.discretization = Discretization::P1;
  sys.hyp = &hyp;
  sys.mesh = mesh;
  sys.stiffness_sparse.resize(nv, nv);
  sys.potential_sparse.resize(nv, nv);
  sys.mass_sparse.resize(nv, nv);
  sys.stiffness_sparse.setFromTriplets(kt.begin(), kt.end());
  sys.potential_sparse.setFromTriplets(pt.begin(), pt.end());
  sys.mass_sparse.setFromTriplets(mt.begin(), mt.end());
  return sys;
}

}  // namespace

Mat ambient_monomials(const DiscreteHypersurface& hyp, int degree, ParityRestriction parity) {
  return monomial_table(hyp, degree, parity, false).values;
}

SpectralSystem assemble_jacobi(const DiscreteHypersurface& hyp, const SpectralOptions& options) {
  check_geometry(hyp);
  return options.discretization == Discretization::Ritz ? assemble_ritz(hyp, options)
                                                         : assemble_p1(hyp, options);
}

int SpectralSystem::size() const {
  return discretization == Discretization::Ritz ? static_cast<int>(stiffness.rows())
                                                : static_cast<int>(stiffness_sparse.rows());
}

double SpectralSystem::quadratic_form(const Vec& u, double* projection_residual) const {
  if (discretization == Discretization::P1) {
    if (u.size() != size()) throw InvalidDimension("P1 functions are given on mesh vertices");
    if (projection_residual) *projection_residual = 0.0;
    return u.dot(stiffness_sparse * u) - u.dot(potential_sparse * u);
  }
  if (u.size() != hyp->node_count()) throw InvalidDimension("function size differs from node count");
  const Vec& w = hyp->weights;
  Vec c = basis.transpose() * w.cwiseProduct(u);
  if (projection_residual) {
    Vec r = u - basis * c;
    double norm = std::sqrt(u.cwiseProduct(u).dot(w));
    *projection_residual = norm > 0.0 ? std::sqrt(r.cwiseProduct(r).dot(w)) / norm : 0.0;
  }
  return c.dot((stiffness - potential) * c);
}

double SpectralSystem::mass_form(const Vec& u) const {
  if (discretization == Discretization::P1) return u.dot(mass_sparse * u);
  Vec c = basis.transpose() * hyp->weights.cwiseProduct(u);
  return c.dot(mass * c);
}

double SpectralSystem::rayleigh_quotient(const Vec& u) const {
  double m = mass_form(u);
  if (!(m > 0.0)) throw InvalidDimension("Rayleigh quotient of the zero function");
  return quadratic_form(u) / m;
}

int SpectrumReport::count_below(double eta) const {
  const double cut = eta - 1e-8 * std::max(1.0, std::abs(eta));
  int c = 0;
  for (int i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues(i) < cut) ++c;
  return c;
}

std::vector<int> SpectrumReport::multiplicities() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (i == 0 || clusters[i] != clusters[i - 1]) out.push_back(0);
    ++out.back();
  }
  return out;
}

SpectrumReport spectrum(const SpectralSystem& system, int how_many) {
  const int size = system.size();
  if (size == 0) throw SolverFailure("empty spectral system", std::nan(""));
  const int count = how_many <= 0 ? size : std::min(how_many, size);
  EigenPairs pairs;
  if (system.discretization == Discretization::Ritz) {
    pairs = dense_lowest(system.stiffness - system.potential, system.mass, count);
  } else if (size <= 1500) {
    pairs = dense_lowest(Mat(system.stiffness_sparse - system.potential_sparse),
                         Mat(system.mass_sparse), count);
  } else {
    ShiftInvertOptions opt;
    double vmax = system.hyp->potential.maxCoeff();
    opt.shift = -vmax - 1.0;
    pairs = sparse_lowest(system.stiffness_sparse - system.potential_sparse, system.mass_sparse,
                          count, opt);
  }
  SpectrumReport r;
  r.eigenvalues = pairs.values;
  r.residuals = pairs.residuals;
  r.eigenvectors = pairs.vectors;
  r.complete = count == size;
  r.clusters.resize(count);
  int cluster = 0;
  for (int i = 0; i < count; ++i) {
    if (i > 0) {
      double gap = r.eigenvalues(i) - r.eigenvalues(i - 1);
      if (gap > kClusterGap * std::max(1.0, std::abs(r.eigenvalues(i)))) ++cluster;
    }
    r.clusters[i] = cluster;
  }
  r.morse_index = r.count_below(0.0);
  return r;
}

void write_spectrum_csv(std::ostream& out, const SpectrumReport& report) {
  out << "index,eigenvalue,residual,cluster\n";
  out.precision(17);
  for (int i = 0; i < report.eigenvalues.size(); ++i)
    out << i << ',' << report.eigenvalues(i) << ',' << report.residuals(i) << ','
        << report.clusters[i] << '\n';
}

}  // namespace minidx
