#include "minidx/hypersurface.hpp"

#include "minidx/errors.hpp"
#include "minidx/numdiff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace minidx {

namespace {

constexpr double kChartStep = 1e-3;
// Second derivatives lose ~eps/h^2 to rounding; a wider step is more accurate here.
constexpr double kCurvatureStep = 5e-3;

// Unit sphere S^k parametrized by tensor axes without pole nodes.
std::vector<AxisKind> sphere_axes(int k) {
  switch (k) {
    case 1: return {AxisKind::Periodic};
    case 2: return {AxisKind::Colatitude, AxisKind::Periodic};
    case 3: return {AxisKind::HopfEta, AxisKind::Periodic, AxisKind::Periodic};
    default: throw InvalidDimension("sphere factors of dimension " + std::to_string(k) +
                                    " are not meshed (1..3 supported)");
  }
}

Vec sphere_point(int k, const Vec& t, int offset) {
  switch (k) {
    case 1: {
      Vec y(2);
      y << std::cos(t(offset)), std::sin(t(offset));
      return y;
    }
    case 2: {
      double phi = t(offset), th = t(offset + 1);
      Vec y(3);
      y << std::sin(phi) * std::cos(th), std::sin(phi) * std::sin(th), std::cos(phi);
      return y;
    }
    case 3: {
      double eta = t(offset), a = t(offset + 1), b = t(offset + 2);
      Vec y(4);
      y << std::cos(eta) * std::cos(a), std::cos(eta) * std::sin(a), std::sin(eta) * std::cos(b),
          std::sin(eta) * std::sin(b);
      return y;
    }
    default: throw InvalidDimension("unsupported sphere factor");
  }
}

double sphere_volume(int k) {
  switch (k) {
    case 1: return 2.0 * M_PI;
    case 2: return 4.0 * M_PI;
    case 3: return 2.0 * M_PI * M_PI;
    default: return std::nan("");
  }
}

bool is_round(AmbientKind k) { return k == AmbientKind::Sphere || k == AmbientKind::RealProjective; }

}  // namespace

std::string to_string(CatalogKind kind) {
  switch (kind) {
    case CatalogKind::EquatorInSphere: return "equator";
    case CatalogKind::CliffordTorus: return "clifford-torus";
    case CatalogKind::GeneralizedClifford: return "generalized-clifford";
    case CatalogKind::CircleTimesEquator: return "circle-equator";
    case CatalogKind::GeodesicSphereCP: return "geodesic-sphere-cp";
    case CatalogKind::EllipsoidSection: return "ellipsoid-section";
  }
  return "unknown";
}

CatalogKind catalog_kind_from_string(const std::string& name) {
  for (CatalogKind k : {CatalogKind::EquatorInSphere, CatalogKind::CliffordTorus,
                        CatalogKind::GeneralizedClifford, CatalogKind::CircleTimesEquator,
                        CatalogKind::GeodesicSphereCP, CatalogKind::EllipsoidSection})
    if (to_string(k) == name) return k;
  throw IncompatibleKind("unknown hypersurface kind '" + name + "'");
}

double geodesic_sphere_minimal_radius(int m, double tol) {
  if (m < 1) throw InvalidDimension("CP^m needs m >= 1");
  auto h = [m](double r) { return 2.0 / std::tan(2.0 * r) + (2.0 * m - 2.0) / std::tan(r); };
  double lo = M_PI / 4.0, hi = M_PI / 2.0 - 1e-9;
  if (m == 1) return M_PI / 4.0;  // h vanishes at pi/4 itself
  // h(pi/4) = 2m - 2 > 0, h -> -infinity at pi/2.
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<int> default_resolution(CatalogKind kind, const CatalogParams& params) {
  switch (kind) {
    case CatalogKind::EquatorInSphere:
      return params.n == 2 ? std::vector<int>{32, 64} : std::vector<int>{16, 32, 32};
    case CatalogKind::CliffordTorus: return {96, 96};
    case CatalogKind::GeneralizedClifford:
    case CatalogKind::CircleTimesEquator:
      if (params.n == 2) return {96, 96};
      if (params.n == 3) return {32, 16, 32};
      return {16, 8, 16, 16};
    case CatalogKind::GeodesicSphereCP: return {32, 32, 32};
    case CatalogKind::EllipsoidSection: return {48, 96};
  }
  return {};
}

HypersurfaceChart make_chart(const AmbientModel& ambient, CatalogKind kind,
                             const CatalogParams& params) {
  HypersurfaceChart c;
  const AmbientKind ak = ambient.kind();
  const int d = ambient.embed_dim();
  auto incompatible = [&]() {
    return IncompatibleKind(to_string(kind) + " cannot live in " + ambient.label());
  };

  switch (kind) {
    case CatalogKind::EquatorInSphere: {
      if (!is_round(ak)) throw incompatible();
      const int n = ambient.intrinsic_dim() - 1;
      if (n != 2 && n != 3) throw InvalidDimension("equators are meshed for n = 2, 3 only");
      c.dim = n;
      c.axes = sphere_axes(n);
      c.lift = [n, d](const Vec& t) {
        Vec x = Vec::Zero(d);
        x.head(n + 1) = sphere_point(n, t, 0);
        return x;
      };
      c.normal = [d](const Vec&) {
        Vec v = Vec::Zero(d);
        v(d - 1) = 1.0;
        return v;
      };
      c.volume = sphere_volume(n);
      c.betti1 = 0;
      c.antipodal_invariant = true;
      break;
    }
    case CatalogKind::CliffordTorus:
    case CatalogKind::GeneralizedClifford: {
      if (!is_round(ak)) throw incompatible();
      const int n = ambient.intrinsic_dim() - 1;
      if (kind == CatalogKind::CliffordTorus && n != 2)
        throw IncompatibleKind("the Clifford torus lives in S^3");
      if (n < 2 || n > 4) throw InvalidDimension("generalized Clifford meshed for n = 2..4");
      const double r = 1.0 / std::sqrt(double(n));
      const double s = std::sqrt(1.0 - r * r);
      c.dim = n;
      c.axes = {AxisKind::Periodic};
      for (AxisKind a : sphere_axes(n - 1)) c.axes.push_back(a);
      c.lift = [n, r, s, d](const Vec& t) {
        Vec x(d);
        x(0) = r * std::cos(t(0));
        x(1) = r * std::sin(t(0));
        x.tail(n) = s * sphere_point(n - 1, t, 1);
        return x;
      };
      c.normal = [n, r, s, d](const Vec& t) {
        Vec v(d);
        v(0) = s * std::cos(t(0));
        v(1) = s * std::sin(t(0));
        v.tail(n) = -r * sphere_point(n - 1, t, 1);
        return v;
      };
      c.volume = 2.0 * M_PI * r * std::pow(s, n - 1) * sphere_volume(n - 1);
      c.betti1 = n == 2 ? 2 : 1;
      c.antipodal_invariant = true;
      break;
    }
    case CatalogKind::CircleTimesEquator: {
      if (ak != AmbientKind::CircleTimesSphere) throw incompatible();
      const int n = ambient.intrinsic_dim() - 1;
      if (n < 2 || n > 4) throw InvalidDimension("circle x equator meshed for n = 2..4");
      c.dim = n;
      c.axes = {AxisKind::Periodic};
      for (AxisKind a : sphere_axes(n - 1)) c.axes.push_back(a);
      c.lift = [n, d](const Vec& t) {
        Vec x = Vec::Zero(d);
        x(0) = std::cos(t(0));
        x(1) = std::sin(t(0));
        x.segment(2, n) = sphere_point(n - 1, t, 1);
        return x;
      };
      c.normal = [d](const Vec&) {
        Vec v = Vec::Zero(d);
        v(d - 1) = 1.0;
        return v;
      };
      c.volume = 2.0 * M_PI * sphere_volume(n - 1);
      c.betti1 = n == 2 ? 2 : 1;
      break;
    }
    case CatalogKind::GeodesicSphereCP: {
      if (ak != AmbientKind::ComplexProjectiveVeronese || ambient.intrinsic_dim() != 4)
        throw IncompatibleKind("geodesic spheres are meshed in CP^2 only");
      const double r = params.radius > 0.0 ? params.radius : geodesic_sphere_minimal_radius(2);
      if (!(r < M_PI / 2)) throw ChartDomainError("geodesic sphere radius must be < pi/2");
      c.dim = 3;
      c.axes = sphere_axes(3);
      // z = (cos r, sin r w) with w in S^3 of C^2; lift stored as real 6-vector.
      c.lift = [r](const Vec& t) {
        Vec w = sphere_point(3, t, 0);
        Vec z(6);
        z << std::cos(r), 0.0, std::sin(r) * w(0), std::sin(r) * w(1), std::sin(r) * w(2),
            std::sin(r) * w(3);
        return z;
      };
      const AmbientModel* amb = &ambient;
      c.normal = [r, amb](const Vec& t) {
        Vec w = sphere_point(3, t, 0);
        Vec z(6), v(6);
        z << std::cos(r), 0.0, std::sin(r) * w(0), std::sin(r) * w(1), std::sin(r) * w(2),
            std::sin(r) * w(3);
        v << -std::sin(r), 0.0, std::cos(r) * w(0), std::cos(r) * w(1), std::cos(r) * w(2),
            std::cos(r) * w(3);
        return amb->lift_differential(z, v);
      };
      c.volume = 2.0 * M_PI * M_PI * std::pow(std::sin(r), 3) * std::cos(r);
      c.betti1 = 0;
      break;
    }
    case CatalogKind::EllipsoidSection: {
      if (ak != AmbientKind::Ellipsoid || d != 4)
        throw IncompatibleKind("ellipsoid sections need a 3-dimensional ellipsoid in R^4");
      const int i = params.axis_index;
      if (i < 0 || i >= 4) throw InvalidDimension("ellipsoid section axis must be 0..3");
      // Semi-axes are recovered from the model's points on the coordinate axes.
      Vec axes(4);
      for (int j = 0; j < 4; ++j) {
        Vec probe = Vec::Zero(4);
        probe(j) = 1.0;
        // Newton along the axis on the level set through curve(): start at e_j.
        AmbientPoint p{probe, probe};
        Vec tangent = Vec::Zero(4);
        axes(j) = ambient.curve(p, tangent, 0.0).position.norm();
      }
      std::vector<int> others;
      for (int j = 0; j < 4; ++j)
        if (j != i) others.push_back(j);
      c.dim = 2;
      c.axes = sphere_axes(2);
      c.lift = [axes, others](const Vec& t) {
        Vec y = sphere_point(2, t, 0);
        Vec x = Vec::Zero(4);
        for (int k = 0; k < 3; ++k) x(others[k]) = axes(others[k]) * y(k);
        return x;
      };
      c.normal = [i](const Vec&) {
        Vec v = Vec::Zero(4);
        v(i) = 1.0;
        return v;
      };
      c.betti1 = 0;
      c.antipodal_invariant = true;
      break;
    }
  }
  (void)params;
  return c;
}

int DiscreteHypersurface::node_index(const std::vector<int>& multi) const {
  int idx = 0;
  for (std::size_t k = 0; k < axes.size(); ++k) idx = idx * axes[k].size() + multi[k];
  return idx;
}

std::vector<int> DiscreteHypersurface::node_multi_index(int node) const {
  std::vector<int> multi(axes.size());
  for (int k = static_cast<int>(axes.size()) - 1; k >= 0; --k) {
    multi[k] = node % axes[k].size();
    node /= axes[k].size();
  }
  return multi;
}

Mat DiscreteHypersurface::frame_derivative(int node, const std::function<Vec(const Vec&)>& f) const {
  Mat jac = numdiff::jacobian(f, Vec(param.col(node)), kChartStep);
  return jac * frame_to_param[node];
}

void DiscreteHypersurface::dump(std::ostream& out) const {
  out << "# columns: node";
  for (int a = 0; a < dim(); ++a) out << " t" << a;
  for (int i = 0; i < embed_dim(); ++i) out << " x" << i;
  out << " weight A2 potential\n";
  out.precision(17);
  for (int a = 0; a < node_count(); ++a) {
    out << a;
    for (int k = 0; k < dim(); ++k) out << ' ' << param(k, a);
    for (int i = 0; i < embed_dim(); ++i) out << ' ' << points[a].position(i);
    out << ' ' << weights(a) << ' ' << shape_norm2(a) << ' ' << potential(a) << '\n';
  }
}

DiscreteHypersurface build_hypersurface(AmbientPtr ambient, CatalogKind kind,
                                        const CatalogParams& params,
                                        const std::vector<int>& resolution) {
  if (!ambient) throw IncompatibleKind("no ambient model");
  DiscreteHypersurface hyp;
  hyp.ambient = ambient;
  hyp.kind = kind;
  hyp.params = params;
  hyp.chart = make_chart(*ambient, kind, params);
  if (kind == CatalogKind::GeodesicSphereCP && !(hyp.params.radius > 0.0))
    hyp.params.radius = geodesic_sphere_minimal_radius(2);
  const int n = hyp.chart.dim;
  const int d = ambient->embed_dim();

  CatalogParams effective = params;
  effective.n = n;
  hyp.resolution = resolution.empty() ? default_resolution(kind, effective) : resolution;
  if (static_cast<int>(hyp.resolution.size()) != n)
    throw InvalidDimension("resolution needs " + std::to_string(n) + " entries for " +
                           to_string(kind));
  for (int k = 0; k < n; ++k) {
    if (hyp.resolution[k] < 4) throw ResolutionTooSmall("each axis needs at least 4 nodes");
    hyp.axes.push_back(make_axis(hyp.chart.axes[k], hyp.resolution[k]));
  }

  int count = 1;
  for (const auto& a : hyp.axes) count *= a.size();
  hyp.param.resize(n, count);
  hyp.points.resize(count);
  hyp.weights.resize(count);
  hyp.normal.resize(d, count);
  hyp.jacobian.resize(count);
  hyp.frame.resize(count);
  hyp.frame_to_param.resize(count);
  hyp.shape.resize(count);
  hyp.shape_norm2.resize(count);
  hyp.ricci_normal.resize(count);
  hyp.potential.resize(count);
  hyp.mean_curvature.resize(count);

  auto position_of = [&](const Vec& t) -> Vec { return hyp.point_at(t).position; };
  std::vector<int> degenerate;

  for (int a = 0; a < count; ++a) {
    std::vector<int> multi = hyp.node_multi_index(a);
    Vec t(n);
    double w = 1.0;
    for (int k = 0; k < n; ++k) {
      t(k) = hyp.axes[k].nodes(multi[k]);
      w *= hyp.axes[k].weights(multi[k]);
    }
    hyp.param.col(a) = t;
    hyp.points[a] = hyp.point_at(t);

    Mat jac = numdiff::jacobian(position_of, t, kChartStep);
    hyp.jacobian[a] = jac;

    // Gram-Schmidt in parameter order: jac = e * R with R upper triangular.
    Mat e(d, n);
    Mat r = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) {
      Vec v = jac.col(k);
      for (int pass = 0; pass < 2; ++pass)
        for (int j = 0; j < k; ++j) {
          double c = e.col(j).dot(v);
          r(j, k) += c;
          v -= c * e.col(j);
        }
      r(k, k) = v.norm();
      e.col(k) = v / r(k, k);
    }
    double scale = jac.cwiseAbs().maxCoeff();
    if (!(r.diagonal().minCoeff() > 1e-8 * std::max(scale, 1.0))) {
      degenerate.push_back(a);
      continue;
    }
    hyp.frame[a] = e;
    Mat rinv = r.triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
    hyp.frame_to_param[a] = rinv;
    hyp.weights(a) = w * r.diagonal().prod();

    Vec nv = hyp.chart.normal(t);
    hyp.normal.col(a) = nv;
    double nres = std::abs(nv.norm() - 1.0);
    nres = std::max(nres, (e.transpose() * nv).cwiseAbs().maxCoeff());
    nres = std::max(nres, ambient->tangency_residual(hyp.points[a], nv));
    hyp.max_normal_residual = std::max(hyp.max_normal_residual, nres);

    Mat dn = numdiff::jacobian(hyp.chart.normal, t, kChartStep) * rinv;  // D_{e_j} N
    Mat shape = -(dn.transpose() * e);  // shape(j,k) = -<D_{e_j}N, e_k>
    hyp.max_shape_asymmetry =
        std::max(hyp.max_shape_asymmetry, (shape - shape.transpose()).cwiseAbs().maxCoeff());
    shape = 0.5 * (shape + shape.transpose());
    hyp.shape[a] = shape;
    hyp.shape_norm2(a) = shape.squaredNorm();
    hyp.mean_curvature(a) = shape.trace();
    hyp.ricci_normal(a) = ricci(*ambient, hyp.points[a], nv);
    hyp.potential(a) = hyp.ricci_normal(a) + hyp.shape_norm2(a);
  }
  if (!degenerate.empty())
    throw FrameDegeneracy("chart Jacobian loses rank at " + std::to_string(degenerate.size()) +
                              " node(s)",
                          degenerate);
  return hyp;
}

// ---------------------------------------------------------------------------

namespace {

/// B(e_i, e_j) for M in R^d: normal part of the chart's second derivatives.
std::vector<Vec> second_form_in_rd(const DiscreteHypersurface& hyp, int node) {
  const int n = hyp.dim();
  const Vec t = hyp.param.col(node);
  auto pos = [&](const Vec& s) -> Vec { return hyp.point_at(s).position; };
  const Mat& e = hyp.frame[node];
  std::vector<Vec> second(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      Vec v = numdiff::second_partial(pos, t, a, b, kCurvatureStep);
      v -= e * (e.transpose() * v);
      second[a * n + b] = v;
      second[b * n + a] = v;
    }
  const Mat& q = hyp.frame_to_param[node];
  std::vector<Vec> out(n * n, Vec::Zero(hyp.embed_dim()));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) out[i * n + j] += q(a, i) * q(b, j) * second[a * n + b];
  return out;
}

}  // namespace

Mat intrinsic_sectional(const DiscreteHypersurface& hyp, int node) {
  const int n = hyp.dim();
  auto b = second_form_in_rd(hyp, node);
  Mat k = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) k(i, j) = b[i * n + i].dot(b[j * n + j]) - b[i * n + j].squaredNorm();
  return k;
}

double intrinsic_ricci(const DiscreteHypersurface& hyp, int node, const Vec& u) {
  const int n = hyp.dim();
  auto b = second_form_in_rd(hyp, node);
  auto bilinear = [&](const Vec& x, const Vec& y) {
    Vec out = Vec::Zero(hyp.embed_dim());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out += x(i) * y(j) * b[i * n + j];
    return out;
  };
  Vec buu = bilinear(u, u);
  double ric = 0.0;
  for (int k = 0; k < n; ++k) {
    Vec ek = Vec::Unit(n, k);
    ric += buu.dot(b[k * n + k]) - bilinear(u, ek).squaredNorm();
  }
  return ric;
}

double gauss_riemann(const DiscreteHypersurface& hyp, int node, const Vec& x, const Vec& y) {
  const Mat& e = hyp.frame[node];
  const Mat& a = hyp.shape[node];
  double rn = riemann_xyxy(*hyp.ambient, hyp.points[node], e * x, e * y);
  double axy = x.dot(a * y);
  return rn + x.dot(a * x) * y.dot(a * y) - axy * axy;
}

// ---------------------------------------------------------------------------

std::string to_string(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::Neither: return "neither";
  }
  return "unknown";
}

DoubleCoverLift lift_to_double_cover(const DiscreteHypersurface& hyp, double tol) {
  const int count = hyp.node_count();
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](int a) { return hyp.position(a)(0); };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
  std::vector<double> sorted(count);
  for (int i = 0; i < count; ++i) sorted[i] = key(order[i]);

  DoubleCoverLift lift;
  lift.base = &hyp;
  lift.partner.assign(count, -1);
  for (int a = 0; a < count; ++a) {
    const Vec target = -hyp.position(a);
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), target(0) - tol);
    for (auto it = lo; it != sorted.end() && *it <= target(0) + tol; ++it) {
      int b = order[it - sorted.begin()];
      if ((hyp.position(b) - target).norm() < tol) {
        lift.partner[a] = b;
        break;
      }
    }
    if (lift.partner[a] < 0 || lift.partner[a] == a)
      throw MeshNotSymmetric("node " + std::to_string(a) + " has no antipodal partner");
  }
  for (int a = 0; a < count; ++a) {
    int b = lift.partner[a];
    if (lift.partner[b] != a) throw MeshNotSymmetric("antipodal pairing is not an involution");
    lift.normal_oddness =
        std::max(lift.normal_oddness, (hyp.normal.col(a) + hyp.normal.col(b)).norm());
  }
  return lift;
}

Parity DoubleCoverLift::classify(const Vec& field, double tol) const {
  double scale = std::max(1.0, field.cwiseAbs().maxCoeff());
  double even = 0.0, odd = 0.0;
  for (std::size_t a = 0; a < partner.size(); ++a) {
    even = std::max(even, std::abs(field(a) - field(partner[a])));
    odd = std::max(odd, std::abs(field(a) + field(partner[a])));
  }
  if (even <= tol * scale) return Parity::Even;
  if (odd <= tol * scale) return Parity::Odd;
  return Parity::Neither;
}

std::vector<int> DoubleCoverLift::representatives() const {
  std::vector<int> reps;
  for (std::size_t a = 0; a < partner.size(); ++a)
    if (static_cast<int>(a) < partner[a]) reps.push_back(static_cast<int>(a));
  return reps;
}

Vec DoubleCoverLift::descend_field(const Vec& field, double tol) const {
  if (classify(field, tol) != Parity::Even)
    throw IncompatibleKind("only even fields descend to the quotient");
  auto reps = representatives();
  Vec out(reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) out(i) = field(reps[i]);
  return out;
}

}  // namespace minidx
