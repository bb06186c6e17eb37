#include "minidx/ambient.hpp"

#include "minidx/errors.hpp"
#include "minidx/numdiff.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <complex>

namespace minidx {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

Vec gaussian_vector(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

/// Orthonormal basis of the orthogonal complement of span(cols) in R^n.
Mat orthogonal_complement(const Mat& cols) {
  const int n = static_cast<int>(cols.rows());
  const int k = static_cast<int>(cols.cols());
  Eigen::HouseholderQR<Mat> qr(cols);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  return q.rightCols(n - k);
}

/// Modified Gram-Schmidt against an existing orthonormal set; keeps vectors
/// whose residual norm exceeds `tol`.
Mat gram_schmidt_extend(const Mat& fixed, const Mat& candidates, int want, double tol = 1e-8) {
  const int n = static_cast<int>(candidates.rows());
  Mat out(n, want);
  int count = 0;
  for (int c = 0; c < candidates.cols() && count < want; ++c) {
    Vec v = candidates.col(c);
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < fixed.cols(); ++j) v -= fixed.col(j).dot(v) * fixed.col(j);
      for (int j = 0; j < count; ++j) v -= out.col(j).dot(v) * out.col(j);
    }
    double nv = v.norm();
    if (nv > tol) out.col(count++) = v / nv;
  }
  if (count < want) throw FrameConstructionError("could not complete an orthonormal frame");
  return out;
}

// ---------------------------------------------------------------------------
// Round unit sphere S^{dim} in R^{dim+1}; also serves RP^{dim} through its cover.

class SphereModel final : public AmbientModel {
 public:
  SphereModel(int dim, bool projective)
      : AmbientModel(projective ? AmbientKind::RealProjective : AmbientKind::Sphere, dim, dim + 1,
                     (projective ? "RP^" : "S^") + std::to_string(dim), double(dim - 1)) {}

  AmbientPoint point_from_lift(const Vec& lift) const override {
    if (lift.size() != embed_dim()) throw ChartDomainError("sphere lift has wrong size");
    if (std::abs(lift.norm() - 1.0) > 1e-8) throw ChartDomainError("sphere lift is not unit");
    return {lift, lift};
  }

  AmbientPoint random_point(Rng& rng) const override {
    Vec v = gaussian_vector(embed_dim(), rng);
    v.normalize();
    return {v, v};
  }

  Mat tangent_basis(const AmbientPoint& p) const override {
    return orthogonal_complement(p.position);
  }

  Vec second_fundamental_form_unchecked(const AmbientPoint& p, const Vec& x,
                                        const Vec& y) const override {
    return -x.dot(y) * p.position;
  }

  AmbientPoint curve(const AmbientPoint& p, const Vec& x, double t) const override {
    double s = x.norm();
    if (s == 0.0) return p;
    Vec c = std::cos(s * t) * p.position + std::sin(s * t) * (x / s);
    return {c, c};
  }

  double variety_residual(const AmbientPoint& p) const override {
    return std::abs(p.position.norm() - 1.0);
  }

  std::optional<double> analytic_riemann_xyxy(const AmbientPoint&, const Vec& x,
                                              const Vec& y) const override {
    double xy = x.dot(y);
    return x.squaredNorm() * y.squaredNorm() - xy * xy;
  }

  std::optional<Vec> outward_normal(const AmbientPoint& p) const override { return p.position; }
  std::optional<Mat> shape_operator(const AmbientPoint&) const override {
    return Mat::Identity(intrinsic_dim(), intrinsic_dim());
  }
};

// ---------------------------------------------------------------------------
// Veronese embedding of CP^m into Hermitian (m+1)x(m+1) matrices with
// <A,B> = Re tr(AB)/2. The lift is a unit z in C^{m+1} stored as
// [Re z_0, Im z_0, Re z_1, ...].

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

class ComplexVeroneseModel final : public AmbientModel {
 public:
  explicit ComplexVeroneseModel(int m)
      : AmbientModel(AmbientKind::ComplexProjectiveVeronese, 2 * m, (m + 1) * (m + 1),
                     "CP^" + std::to_string(m), double(2 * m + 2)),
        m_(m) {}

  int size() const { return m_ + 1; }

  CVec to_complex(const Vec& lift) const {
    CVec z(size());
    for (int i = 0; i < size(); ++i) z(i) = {lift(2 * i), lift(2 * i + 1)};
    return z;
  }
  Vec to_real(const CVec& z) const {
    Vec v(2 * size());
    for (int i = 0; i < size(); ++i) {
      v(2 * i) = z(i).real();
      v(2 * i + 1) = z(i).imag();
    }
    return v;
  }

  Vec herm_to_vec(const CMat& h) const {
    const int s = size();
    Vec v(embed_dim());
    for (int i = 0; i < s; ++i) v(i) = h(i, i).real() / kSqrt2;
    int k = s;
    for (int i = 0; i < s; ++i)
      for (int j = i + 1; j < s; ++j) {
        v(k++) = h(i, j).real();
        v(k++) = h(i, j).imag();
      }
    return v;
  }

  CMat vec_to_herm(const Vec& v) const {
    const int s = size();
    CMat h = CMat::Zero(s, s);
    for (int i = 0; i < s; ++i) h(i, i) = v(i) * kSqrt2;
    int k = s;
    for (int i = 0; i < s; ++i)
      for (int j = i + 1; j < s; ++j) {
        std::complex<double> a(v(k), v(k + 1));
        k += 2;
        h(i, j) = a;
        h(j, i) = std::conj(a);
      }
    return h;
  }

  /// dP_z(v) = v z^* + z v^*.
  Vec differential(const CVec& z, const CVec& v) const {
    CMat h = v * z.adjoint() + z * v.adjoint();
    return herm_to_vec(h);
  }

  /// Horizontal lift of a tangent vector: X z.
  CVec horizontal_lift(const AmbientPoint& p, const Vec& x) const {
    return vec_to_herm(x) * to_complex(p.lift);
  }

  Vec lift_differential(const Vec& lift, const Vec& v) const override {
    return differential(to_complex(lift), to_complex(v));
  }

  AmbientPoint point_from_lift(const Vec& lift) const override {
    if (lift.size() != 2 * size()) throw ChartDomainError("CP lift has wrong size");
    if (std::abs(lift.norm() - 1.0) > 1e-8) throw ChartDomainError("CP lift is not unit");
    CVec z = to_complex(lift);
    return {herm_to_vec(z * z.adjoint()), lift};
  }

  AmbientPoint random_point(Rng& rng) const override {
    Vec v = gaussian_vector(2 * size(), rng);
    v.normalize();
    return point_from_lift(v);
  }

  Mat horizontal_basis_real(const CVec& z) const {
    const int s = size();
    Mat fixed(2 * s, 2);
    fixed.col(0) = to_real(z);
    fixed.col(1) = to_real(std::complex<double>(0, 1) * z);
    return gram_schmidt_extend(fixed, Mat::Identity(2 * s, 2 * s), 2 * m_);
  }

  Mat tangent_basis(const AmbientPoint& p) const override {
    CVec z = to_complex(p.lift);
    Mat h = horizontal_basis_real(z);
    Mat b(embed_dim(), 2 * m_);
    for (int k = 0; k < 2 * m_; ++k) b.col(k) = differential(z, to_complex(h.col(k)));
    return b;
  }

  Vec second_fundamental_form_unchecked(const AmbientPoint& p, const Vec& x,
                                        const Vec& y) const override {
    CVec z = to_complex(p.lift);
    CVec v = vec_to_herm(x) * z;
    CVec w = vec_to_herm(y) * z;
    double re = (w.adjoint() * v)(0).real();
    CMat h = v * w.adjoint() + w * v.adjoint() - 2.0 * re * (z * z.adjoint());
    return herm_to_vec(h);
  }

  AmbientPoint curve(const AmbientPoint& p, const Vec& x, double t) const override {
    CVec z = to_complex(p.lift);
    CVec v = vec_to_herm(x) * z;
    double s = v.norm();
    if (s == 0.0) return p;
    CVec g = std::cos(s * t) * z + std::sin(s * t) * (v / s);
    return point_from_lift(to_real(g));
  }

  double variety_residual(const AmbientPoint& p) const override {
    CMat h = vec_to_herm(p.position);
    return (h * h - h).norm() + std::abs(h.trace().real() - 1.0) + std::abs(h.trace().imag());
  }

  std::optional<Vec> complex_structure(const AmbientPoint& p, const Vec& x) const override {
    CVec z = to_complex(p.lift);
    CVec v = vec_to_herm(x) * z;
    return differential(z, std::complex<double>(0, 1) * v);
  }

  std::optional<double> analytic_riemann_xyxy(const AmbientPoint& p, const Vec& x,
                                              const Vec& y) const override {
    double xy = x.dot(y);
    double xjy = x.dot(*complex_structure(p, y));
    return x.squaredNorm() * y.squaredNorm() - xy * xy + 3.0 * xjy * xjy;
  }

 private:
  int m_;
};

// ---------------------------------------------------------------------------
// Quaternions with the Hamilton product, and the Veronese embedding of HP^p.

struct Quat {
  double w = 0, x = 0, y = 0, z = 0;
  Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z, w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x, w * o.z + x * o.y - y * o.x + z * o.w};
  }
  Quat operator+(const Quat& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
  Quat operator-(const Quat& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
  Quat operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
  Quat conj() const { return {w, -x, -y, -z}; }
  double norm2() const { return w * w + x * x + y * y + z * z; }
};

using QVec = std::vector<Quat>;

class QuaternionicVeroneseModel final : public AmbientModel {
 public:
  explicit QuaternionicVeroneseModel(int p)
      : AmbientModel(AmbientKind::QuaternionicProjectiveVeronese, 4 * p, (2 * p + 1) * (p + 1),
                     "HP^" + std::to_string(p), double(4 * p + 8)),
        p_(p) {}

  int size() const { return p_ + 1; }

  QVec to_quat(const Vec& v) const {
    QVec q(size());
    for (int i = 0; i < size(); ++i) q[i] = {v(4 * i), v(4 * i + 1), v(4 * i + 2), v(4 * i + 3)};
    return q;
  }
  Vec to_real(const QVec& q) const {
    Vec v(4 * size());
    for (int i = 0; i < size(); ++i) {
      v(4 * i) = q[i].w;
      v(4 * i + 1) = q[i].x;
      v(4 * i + 2) = q[i].y;
      v(4 * i + 3) = q[i].z;
    }
    return v;
  }

  // Hermitian quaternionic matrices stored row-major in a flat vector.
  using QMat = std::vector<Quat>;

  Vec herm_to_vec(const QMat& h) const {
    const int s = size();
    Vec v(embed_dim());
    for (int i = 0; i < s; ++i) v(i) = h[i * s + i].w / kSqrt2;
    int k = s;
    for (int i = 0; i < s; ++i)
      for (int j = i + 1; j < s; ++j) {
        const Quat& a = h[i * s + j];
        v(k++) = a.w;
        v(k++) = a.x;
        v(k++) = a.y;
        v(k++) = a.z;
      }
    return v;
  }

  QMat vec_to_herm(const Vec& v) const {
    const int s = size();
    QMat h(s * s);
    for (int i = 0; i < s; ++i) h[i * s + i] = {v(i) * kSqrt2, 0, 0, 0};
    int k = s;
    for (int i = 0; i < s; ++i)
      for (int j = i + 1; j < s; ++j) {
        Quat a{v(k), v(k + 1), v(k + 2), v(k + 3)};
        k += 4;
        h[i * s + j] = a;
        h[j * s + i] = a.conj();
      }
    return h;
  }

  QMat outer(const QVec& a, const QVec& b) const {
    const int s = size();
    QMat h(s * s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) h[i * s + j] = a[i] * b[j].conj();
    return h;
  }

  QVec apply(const QMat& h, const QVec& z) const {
    const int s = size();
    QVec out(s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) out[i] = out[i] + h[i * s + j] * z[j];
    return out;
  }

  Vec differential(const QVec& z, const QVec& v) const {
    QMat a = outer(v, z);
    QMat b = outer(z, v);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] + b[i];
    return herm_to_vec(a);
  }

  Vec lift_differential(const Vec& lift, const Vec& v) const override {
    return differential(to_quat(lift), to_quat(v));
  }

  AmbientPoint point_from_lift(const Vec& lift) const override {
    if (lift.size() != 4 * size()) throw ChartDomainError("HP lift has wrong size");
    if (std::abs(lift.norm() - 1.0) > 1e-8) throw ChartDomainError("HP lift is not unit");
    QVec z = to_quat(lift);
    return {herm_to_vec(outer(z, z)), lift};
  }

  AmbientPoint random_point(Rng& rng) const override {
    Vec v = gaussian_vector(4 * size(), rng);
    v.normalize();
    return point_from_lift(v);
  }

  static QVec right_mul(const QVec& z, const Quat& q) {
    QVec out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] * q;
    return out;
  }

  Mat tangent_basis(const AmbientPoint& pt) const override {
    QVec z = to_quat(pt.lift);
    const int s = size();
    Mat fixed(4 * s, 4);
    fixed.col(0) = to_real(right_mul(z, {1, 0, 0, 0}));
    fixed.col(1) = to_real(right_mul(z, {0, 1, 0, 0}));
    fixed.col(2) = to_real(right_mul(z, {0, 0, 1, 0}));
    fixed.col(3) = to_real(right_mul(z, {0, 0, 0, 1}));
    Mat h = gram_schmidt_extend(fixed, Mat::Identity(4 * s, 4 * s), 4 * p_);
    Mat b(embed_dim(), 4 * p_);
    for (int k = 0; k < 4 * p_; ++k) b.col(k) = differential(z, to_quat(h.col(k)));
    return b;
  }

  Vec second_fundamental_form_unchecked(const AmbientPoint& pt, const Vec& x,
                                        const Vec& y) const override {
    QVec z = to_quat(pt.lift);
    QVec v = apply(vec_to_herm(x), z);
    QVec w = apply(vec_to_herm(y), z);
    double re = to_real(v).dot(to_real(w));
    QMat a = outer(v, w);
    QMat b = outer(w, v);
    QMat c = outer(z, z);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] + b[i] - c[i] * (2.0 * re);
    return herm_to_vec(a);
  }

  AmbientPoint curve(const AmbientPoint& pt, const Vec& x, double t) const override {
    QVec z = to_quat(pt.lift);
    Vec v = to_real(apply(vec_to_herm(x), z));
    double s = v.norm();
    if (s == 0.0) return pt;
    Vec g = std::cos(s * t) * pt.lift + std::sin(s * t) * (v / s);
    return point_from_lift(g);
  }

  double variety_residual(const AmbientPoint& pt) const override {
    const int s = size();
    QMat h = vec_to_herm(pt.position);
    double res = 0.0;
    double tr = 0.0;
    for (int i = 0; i < s; ++i) {
      tr += h[i * s + i].w;
      for (int j = 0; j < s; ++j) {
        Quat acc;
        for (int k = 0; k < s; ++k) acc = acc + h[i * s + k] * h[k * s + j];
        res += (acc - h[i * s + j]).norm2();
      }
    }
    return std::sqrt(res) + std::abs(tr - 1.0);
  }

  std::optional<double> analytic_riemann_xyxy(const AmbientPoint& pt, const Vec& x,
                                              const Vec& y) const override {
    QVec z = to_quat(pt.lift);
    QVec w = apply(vec_to_herm(y), z);
    double xy = x.dot(y);
    double val = x.squaredNorm() * y.squaredNorm() - xy * xy;
    const Quat units[3] = {{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    for (const Quat& u : units) {
      double c = x.dot(differential(z, right_mul(w, u)));
      val += 3.0 * c * c;
    }
    return val;
  }

 private:
  int p_;
};

// ---------------------------------------------------------------------------
// Product of unit spheres S^a x S^b in R^{a+1} x R^{b+1}.

class SphereProductModel final : public AmbientModel {
 public:
  SphereProductModel(int a, int b, bool circle)
      : AmbientModel(circle ? AmbientKind::CircleTimesSphere : AmbientKind::SphereTimesSphere,
                     a + b, a + b + 2,
                     "S^" + std::to_string(a) + "xS^" + std::to_string(b),
                     (a == b && a >= 2) ? std::optional<double>(a - 1) : std::nullopt),
        a_(a),
        b_(b) {}

  int first_dim() const { return a_; }
  int second_dim() const { return b_; }
  std::vector<int> factor_dims() const override { return {a_, b_}; }

  Vec pi1(const Vec& v) const {
    Vec out = Vec::Zero(v.size());
    out.head(a_ + 1) = v.head(a_ + 1);
    return out;
  }
  Vec pi2(const Vec& v) const {
    Vec out = Vec::Zero(v.size());
    out.tail(b_ + 1) = v.tail(b_ + 1);
    return out;
  }

  AmbientPoint point_from_lift(const Vec& lift) const override {
    if (lift.size() != embed_dim()) throw ChartDomainError("product lift has wrong size");
    if (std::abs(lift.head(a_ + 1).norm() - 1.0) > 1e-8 ||
        std::abs(lift.tail(b_ + 1).norm() - 1.0) > 1e-8)
      throw ChartDomainError("product lift is not on S^a x S^b");
    return {lift, lift};
  }

  AmbientPoint random_point(Rng& rng) const override {
    Vec v(embed_dim());
    v.head(a_ + 1) = gaussian_vector(a_ + 1, rng).normalized();
    v.tail(b_ + 1) = gaussian_vector(b_ + 1, rng).normalized();
    return {v, v};
  }

  Mat tangent_basis(const AmbientPoint& p) const override {
    Mat b = Mat::Zero(embed_dim(), a_ + b_);
    b.block(0, 0, a_ + 1, a_) = orthogonal_complement(p.position.head(a_ + 1));
    b.block(a_ + 1, a_, b_ + 1, b_) = orthogonal_complement(p.position.tail(b_ + 1));
    return b;
  }

  Vec second_fundamental_form_unchecked(const AmbientPoint& p, const Vec& x,
                                        const Vec& y) const override {
    Vec out = Vec::Zero(embed_dim());
    out.head(a_ + 1) = -x.head(a_ + 1).dot(y.head(a_ + 1)) * p.position.head(a_ + 1);
    out.tail(b_ + 1) = -x.tail(b_ + 1).dot(y.tail(b_ + 1)) * p.position.tail(b_ + 1);
    return out;
  }

  AmbientPoint curve(const AmbientPoint& p, const Vec& x, double t) const override {
    Vec c(embed_dim());
    auto great_circle = [t](const Vec& base, const Vec& dir) -> Vec {
      double s = dir.norm();
      if (s == 0.0) return base;
      return std::cos(s * t) * base + std::sin(s * t) * (dir / s);
    };
    c.head(a_ + 1) = great_circle(p.position.head(a_ + 1), x.head(a_ + 1));
    c.tail(b_ + 1) = great_circle(p.position.tail(b_ + 1), x.tail(b_ + 1));
    return {c, c};
  }

  double variety_residual(const AmbientPoint& p) const override {
    return std::abs(p.position.head(a_ + 1).norm() - 1.0) +
           std::abs(p.position.tail(b_ + 1).norm() - 1.0);
  }

  std::optional<double> analytic_riemann_xyxy(const AmbientPoint&, const Vec& x,
                                              const Vec& y) const override {
    auto block = [](const Vec& u, const Vec& v) {
      double uv = u.dot(v);
      return u.squaredNorm() * v.squaredNorm() - uv * uv;
    };
    return block(x.head(a_ + 1), y.head(a_ + 1)) + block(x.tail(b_ + 1), y.tail(b_ + 1));
  }

 private:
  int a_;
  int b_;
};

// ---------------------------------------------------------------------------
// Closed hypersurfaces {F = 0} of R^{n+2}.

class LevelSetModel : public AmbientModel {
 public:
  using AmbientModel::AmbientModel;

  virtual double level(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  virtual Mat hessian(const Vec& x) const = 0;

  Vec unit_normal(const Vec& x) const { return gradient(x).normalized(); }

  AmbientPoint point_from_lift(const Vec& lift) const override {
    if (lift.size() != embed_dim()) throw ChartDomainError("level-set lift has wrong size");
    if (std::abs(level(lift)) > 1e-7) throw ChartDomainError("point is off the hypersurface");
    return {lift, lift};
  }

  Mat tangent_basis(const AmbientPoint& p) const override {
    return orthogonal_complement(unit_normal(p.position));
  }

  /// Scalar second fundamental form s(X,Y) = X^T Hess F Y / |grad F|.
  double shape_form(const AmbientPoint& p, const Vec& x, const Vec& y) const {
    return x.dot(hessian(p.position) * y) / gradient(p.position).norm();
  }

  Vec second_fundamental_form_unchecked(const AmbientPoint& p, const Vec& x,
                                        const Vec& y) const override {
    return -shape_form(p, x, y) * unit_normal(p.position);
  }

  AmbientPoint curve(const AmbientPoint& p, const Vec& x, double t) const override {
    Vec c = p.position + t * x;
    for (int it = 0; it < 50; ++it) {
      Vec g = gradient(c);
      double f = level(c);
      c -= f * g / g.squaredNorm();
      if (std::abs(f) < 1e-15) break;
    }
    return {c, c};
  }

  double variety_residual(const AmbientPoint& p) const override {
    return std::abs(level(p.position));
  }

  std::optional<Vec> outward_normal(const AmbientPoint& p) const override {
    return unit_normal(p.position);
  }

  std::optional<Mat> shape_operator(const AmbientPoint& p) const override {
    Mat b = tangent_basis(p);
    return b.transpose() * hessian(p.position) * b / gradient(p.position).norm();
  }

  std::optional<double> analytic_riemann_xyxy(const AmbientPoint& p, const Vec& x,
                                              const Vec& y) const override {
    Mat h = hessian(p.position) / gradient(p.position).norm();
    double sxy = x.dot(h * y);
    return x.dot(h * x) * y.dot(h * y) - sxy * sxy;
  }
};

class EllipsoidModel final : public LevelSetModel {
 public:
  explicit EllipsoidModel(std::vector<double> axes)
      : LevelSetModel(AmbientKind::Ellipsoid, int(axes.size()) - 1, int(axes.size()),
                      "Ellipsoid" + std::to_string(axes.size() - 1)),
        inv2_(axes.size()) {
    for (std::size_t i = 0; i < axes.size(); ++i) inv2_(i) = 1.0 / (axes[i] * axes[i]);
    axes_ = Eigen::Map<const Vec>(axes.data(), int(axes.size()));
  }

  const Vec& semi_axes() const { return axes_; }

  double level(const Vec& x) const override { return x.dot(inv2_.cwiseProduct(x)) - 1.0; }
  Vec gradient(const Vec& x) const override { return 2.0 * inv2_.cwiseProduct(x); }
  Mat hessian(const Vec&) const override { return Mat(2.0 * inv2_.asDiagonal()); }

  AmbientPoint random_point(Rng& rng) const override {
    Vec u = gaussian_vector(embed_dim(), rng);
    Vec x = u / std::sqrt(u.dot(inv2_.cwiseProduct(u)));
    return {x, x};
  }

 private:
  Vec inv2_;
  Vec axes_;
};

/// Radial graph {rho(u) u : u in S^{n+1}} given by a positive height function.
/// Derivatives by central differences with one Richardson level.
class RadialGraphModel final : public LevelSetModel {
 public:
  RadialGraphModel(int dim, std::function<double(const Vec&)> height)
      : LevelSetModel(AmbientKind::GenericEmbeddedHypersurface, dim, dim + 1,
                      "RadialGraph" + std::to_string(dim)),
        height_(std::move(height)) {}

  double level(const Vec& x) const override {
    double r = x.norm();
    return r - height_(x / r);
  }
  Vec gradient(const Vec& x) const override {
    auto f = [this](const Vec& y) { return level(y); };
    return numdiff::gradient(f, x, 1e-5);
  }
  Mat hessian(const Vec& x) const override {
    auto f = [this](const Vec& y) { return level(y); };
    return numdiff::hessian(f, x, 1e-3);
  }

  AmbientPoint random_point(Rng& rng) const override {
    Vec u = gaussian_vector(embed_dim(), rng).normalized();
    Vec x = height_(u) * u;
    return {x, x};
  }

 private:
  std::function<double(const Vec&)> height_;
};

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(AmbientKind kind) {
  switch (kind) {
    case AmbientKind::Sphere: return "sphere";
    case AmbientKind::RealProjective: return "real-projective";
    case AmbientKind::ComplexProjectiveVeronese: return "cp";
    case AmbientKind::QuaternionicProjectiveVeronese: return "hp";
    case AmbientKind::CircleTimesSphere: return "circle-sphere";
    case AmbientKind::SphereTimesSphere: return "sphere-sphere";
    case AmbientKind::Ellipsoid: return "ellipsoid";
    case AmbientKind::GenericEmbeddedHypersurface: return "radial-graph";
  }
  return "unknown";
}

AmbientKind ambient_kind_from_string(const std::string& name) {
  for (AmbientKind k :
       {AmbientKind::Sphere, AmbientKind::RealProjective, AmbientKind::ComplexProjectiveVeronese,
        AmbientKind::QuaternionicProjectiveVeronese, AmbientKind::CircleTimesSphere,
        AmbientKind::SphereTimesSphere, AmbientKind::Ellipsoid,
        AmbientKind::GenericEmbeddedHypersurface})
    if (to_string(k) == name) return k;
  throw IncompatibleKind("unknown ambient kind '" + name + "'");
}

AmbientPtr make_ambient(AmbientKind kind, const AmbientParams& params) {
  auto need = [&](std::size_t count) {
    if (params.dims.size() != count)
      throw InvalidDimension(to_string(kind) + " expects " + std::to_string(count) +
                             " dimension parameter(s)");
  };
  switch (kind) {
    case AmbientKind::Sphere:
    case AmbientKind::RealProjective:
      need(1);
      if (params.dims[0] < 2) throw InvalidDimension("sphere dimension must be >= 2");
      return std::make_shared<SphereModel>(params.dims[0], kind == AmbientKind::RealProjective);
    case AmbientKind::ComplexProjectiveVeronese:
      need(1);
      if (params.dims[0] < 1) throw InvalidDimension("CP^m needs m >= 1");
      return std::make_shared<ComplexVeroneseModel>(params.dims[0]);
    case AmbientKind::QuaternionicProjectiveVeronese:
      need(1);
      if (params.dims[0] < 1) throw InvalidDimension("HP^p needs p >= 1");
      return std::make_shared<QuaternionicVeroneseModel>(params.dims[0]);
    case AmbientKind::CircleTimesSphere:
      need(1);
      if (params.dims[0] < 2) throw InvalidDimension("S^1 x S^n needs n >= 2");
      return std::make_shared<SphereProductModel>(1, params.dims[0], true);
    case AmbientKind::SphereTimesSphere:
      need(2);
      if (params.dims[0] < 1 || params.dims[1] < 1)
        throw InvalidDimension("S^p x S^q needs p, q >= 1");
      return std::make_shared<SphereProductModel>(params.dims[0], params.dims[1], false);
    case AmbientKind::Ellipsoid:
      if (params.semi_axes.size() < 3) throw InvalidDimension("ellipsoid needs >= 3 semi-axes");
      for (double a : params.semi_axes)
        if (!(a > 0.0)) throw InvalidDimension("ellipsoid semi-axes must be positive");
      return std::make_shared<EllipsoidModel>(params.semi_axes);
    case AmbientKind::GenericEmbeddedHypersurface:
      need(1);
      if (params.dims[0] < 2) throw InvalidDimension("radial graph dimension must be >= 2");
      if (!params.radial_height) throw InvalidDimension("radial graph needs a height function");
      return std::make_shared<RadialGraphModel>(params.dims[0], params.radial_height);
  }
  throw IncompatibleKind("unhandled ambient kind");
}

AmbientPtr make_sphere(int dim) { return make_ambient(AmbientKind::Sphere, {{dim}, {}, {}}); }
AmbientPtr make_real_projective(int dim) {
  return make_ambient(AmbientKind::RealProjective, {{dim}, {}, {}});
}
AmbientPtr make_cp(int m) {
  return make_ambient(AmbientKind::ComplexProjectiveVeronese, {{m}, {}, {}});
}
AmbientPtr make_hp(int p) {
  return make_ambient(AmbientKind::QuaternionicProjectiveVeronese, {{p}, {}, {}});
}
AmbientPtr make_circle_times_sphere(int n) {
  return make_ambient(AmbientKind::CircleTimesSphere, {{n}, {}, {}});
}
AmbientPtr make_sphere_times_sphere(int p, int q) {
  return make_ambient(AmbientKind::SphereTimesSphere, {{p, q}, {}, {}});
}
AmbientPtr make_ellipsoid(std::vector<double> semi_axes) {
  return make_ambient(AmbientKind::Ellipsoid, {{}, std::move(semi_axes), {}});
}
AmbientPtr make_radial_graph(int dim, std::function<double(const Vec&)> height) {
  return make_ambient(AmbientKind::GenericEmbeddedHypersurface, {{dim}, {}, std::move(height)});
}

// ---------------------------------------------------------------------------

Vec AmbientModel::lift_differential(const Vec&, const Vec& v) const { return v; }

Vec AmbientModel::project_tangent(const AmbientPoint& p, const Vec& v) const {
  Mat b = tangent_basis(p);
  return b * (b.transpose() * v);
}

double AmbientModel::tangency_residual(const AmbientPoint& p, const Vec& v) const {
  return (v - project_tangent(p, v)).norm() / std::max(1.0, v.norm());
}

Vec AmbientModel::second_fundamental_form(const AmbientPoint& p, const Vec& x,
                                          const Vec& y) const {
  constexpr double tol = 1e-8;
  if (x.size() != embed_dim() || y.size() != embed_dim())
    throw TangencyViolation("vector has wrong dimension for " + label());
  if (tangency_residual(p, x) > tol || tangency_residual(p, y) > tol)
    throw TangencyViolation("vector is not tangent to " + label());
  return second_fundamental_form_unchecked(p, x, y);
}

Vec AmbientModel::random_tangent(const AmbientPoint& p, Rng& rng) const {
  Mat b = tangent_basis(p);
  return b * gaussian_vector(static_cast<int>(b.cols()), rng);
}

double riemann_xyxy(const AmbientModel& model, const AmbientPoint& p, const Vec& x,
                    const Vec& y) {
  Vec xx = model.second_fundamental_form_unchecked(p, x, x);
  Vec yy = model.second_fundamental_form_unchecked(p, y, y);
  Vec xy = model.second_fundamental_form_unchecked(p, x, y);
  return xx.dot(yy) - xy.squaredNorm();
}

double ricci(const AmbientModel& model, const AmbientPoint& p, const Vec& x) {
  Mat b = model.tangent_basis(p);
  double sum = 0.0;
  for (int k = 0; k < b.cols(); ++k) sum += riemann_xyxy(model, p, x, b.col(k));
  return sum;
}

double scalar_curvature(const AmbientModel& model, const AmbientPoint& p) {
  Mat b = model.tangent_basis(p);
  double sum = 0.0;
  for (int i = 0; i < b.cols(); ++i)
    for (int k = 0; k < b.cols(); ++k)
      if (k != i) sum += riemann_xyxy(model, p, b.col(i), b.col(k));
  return sum;
}

Vec mean_curvature_vector(const AmbientModel& model, const AmbientPoint& p) {
  Mat b = model.tangent_basis(p);
  Vec h = Vec::Zero(model.embed_dim());
  for (int i = 0; i < b.cols(); ++i)
    h += model.second_fundamental_form_unchecked(p, b.col(i), b.col(i));
  return h;
}

double second_fundamental_form_norm2(const AmbientModel& model, const AmbientPoint& p) {
  Mat b = model.tangent_basis(p);
  double sum = 0.0;
  for (int i = 0; i < b.cols(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      sum += model.second_fundamental_form_unchecked(p, b.col(i), b.col(j)).squaredNorm();
  return sum;
}

std::pair<Vec, Vec> random_orthonormal_pair(const AmbientModel& model, const AmbientPoint& p,
                                            Rng& rng) {
  Vec x = model.random_tangent(p, rng).normalized();
  Vec y = model.random_tangent(p, rng);
  y -= x.dot(y) * x;
  return {x, y.normalized()};
}

Mat frame_completing(const AmbientModel& model, const AmbientPoint& p, const Vec& x) {
  double nx = x.norm();
  if (!(nx > 1e-12)) throw FrameConstructionError("cannot complete a frame from X = 0");
  Mat fixed = x / nx;
  Mat rest = gram_schmidt_extend(fixed, model.tangent_basis(p), model.intrinsic_dim() - 1);
  Mat out(model.embed_dim(), model.intrinsic_dim());
  out.col(0) = fixed.col(0);
  out.rightCols(model.intrinsic_dim() - 1) = rest;
  return out;
}

Vec second_fundamental_form_fd(const AmbientModel& model, const AmbientPoint& p, const Vec& x,
                               double step) {
  auto pos = [&](double t) -> Vec { return model.curve(p, x, t).position; };
  Vec acc = numdiff::second_derivative(pos, step);
  return acc - model.project_tangent(p, acc);
}

double IdentityReport::max_residual() const {
  double m = 0.0;
  for (const auto& [name, value] : residuals) m = std::max(m, value);
  return m;
}

namespace {

void record(IdentityReport& report, const std::string& name, double value) {
  auto [it, inserted] = report.residuals.emplace(name, value);
  if (!inserted) it->second = std::max(it->second, value);
}

/// |P_T dF/dt - J P_T dY/dt| along a curve, Y = P_T W extended tangentially.
double complex_structure_parallelism(const AmbientModel& model, const AmbientPoint& p,
                                     const Vec& x, const Vec& w) {
  auto field_y = [&](double t) -> Vec {
    AmbientPoint c = model.curve(p, x, t);
    return model.project_tangent(c, w);
  };
  auto field_jy = [&](double t) -> Vec {
    AmbientPoint c = model.curve(p, x, t);
    return *model.complex_structure(c, model.project_tangent(c, w));
  };
  Vec dy = numdiff::derivative(field_y, 1e-3);
  Vec djy = numdiff::derivative(field_jy, 1e-3);
  Vec lhs = model.project_tangent(p, djy);
  Vec rhs = *model.complex_structure(p, model.project_tangent(p, dy));
  return (lhs - rhs).norm();
}

}  // namespace

IdentityReport verify_model_identities(const AmbientModel& model, int sample_count,
                                       std::uint64_t seed) {
  IdentityReport report;
  report.model = model.label();
  report.samples = std::max(sample_count, 0);
  report.einstein_constant = model.einstein_constant();
  report.min_sectional = std::numeric_limits<double>::infinity();
  report.max_sectional = -std::numeric_limits<double>::infinity();

  const AmbientKind kind = model.kind();
  const bool veronese = kind == AmbientKind::ComplexProjectiveVeronese ||
                        kind == AmbientKind::QuaternionicProjectiveVeronese;
  const bool round = kind == AmbientKind::Sphere || kind == AmbientKind::RealProjective;
  const bool product =
      kind == AmbientKind::CircleTimesSphere || kind == AmbientKind::SphereTimesSphere;
  const bool has_j = kind == AmbientKind::ComplexProjectiveVeronese;

  Rng rng(seed);
  for (int s = 0; s < report.samples; ++s) {
    AmbientPoint p = model.random_point(rng);
    Mat b = model.tangent_basis(p);
    auto [x, y] = random_orthonormal_pair(model, p, rng);

    record(report, "variety", model.variety_residual(p));
    record(report, "tangent_orthonormality",
           (b.transpose() * b - Mat::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff());
    // The curve's velocity must reproduce X: checks chart, lift and tangent
    // space against each other.
    {
      auto pos = [&](double t) -> Vec { return model.curve(p, x, t).position; };
      record(report, "chart_isometry", (numdiff::derivative(pos, 1e-3) - x).norm());
      record(report, "variety", model.variety_residual(model.curve(p, x, 0.3)));
    }

    Vec iixx = model.second_fundamental_form_unchecked(p, x, x);
    Vec iiyy = model.second_fundamental_form_unchecked(p, y, y);
    Vec iixy = model.second_fundamental_form_unchecked(p, x, y);
    Vec iiyx = model.second_fundamental_form_unchecked(p, y, x);
    record(report, "ii_symmetry", (iixy - iiyx).norm());
    record(report, "ii_normality", model.project_tangent(p, iixy).norm());
    record(report, "ii_finite_difference",
           (iixx - second_fundamental_form_fd(model, p, x, 1e-3)).norm());

    const double rm = iixx.dot(iiyy) - iixy.squaredNorm();
    report.min_sectional = std::min(report.min_sectional, rm);
    report.max_sectional = std::max(report.max_sectional, rm);

    if (auto analytic = model.analytic_riemann_xyxy(p, x, y))
      record(report, "gauss_closure", std::abs(rm - *analytic));

    // Scaling and symmetry of the curvature quadratic form.
    {
      const double c = 1.7;
      double scaled = riemann_xyxy(model, p, c * x, y);
      record(report, "riemann_scaling", std::abs(scaled - c * c * rm));
      record(report, "riemann_symmetry", std::abs(riemann_xyxy(model, p, y, x) - rm));
    }

    if (auto k = model.einstein_constant()) {
      record(report, "einstein", std::abs(ricci(model, p, x) - *k));
      record(report, "einstein", std::abs(ricci(model, p, y) - *k));
    }

    {
      const double r = scalar_curvature(model, p);
      const Vec h = mean_curvature_vector(model, p);
      record(report, "contraction",
             std::abs(r - (h.squaredNorm() - second_fundamental_form_norm2(model, p))));
    }

    if (round) {
      Vec w = model.random_tangent(p, rng);
      record(report, "umbilicity",
             (model.second_fundamental_form_unchecked(p, x, w) + x.dot(w) * p.position).norm());
      record(report, "umbilicity", std::abs(iixx.norm() - 1.0));
    }

    if (veronese) {
      record(report, "veronese_unit", std::abs(iixx.squaredNorm() - 4.0));
      record(report, "veronese_polarized", std::abs(iixx.dot(iiyy) + 2.0 * iixy.squaredNorm() - 4.0));
      record(report, "veronese_mixed", std::abs(iixy.squaredNorm() - (4.0 - rm) / 3.0));
      record(report, "sectional_range", std::max({0.0, 1.0 - rm, rm - 4.0}));
    }

    if (has_j) {
      Vec jy = *model.complex_structure(p, y);
      Vec jx = *model.complex_structure(p, x);
      const double g = x.dot(jy);
      record(report, "sectional_formula", std::abs(rm - (1.0 + 3.0 * g * g)));
      record(report, "j_isometry", std::abs(jx.norm() - x.norm()));
      record(report, "j_squared", (*model.complex_structure(p, jx) + x).norm());
      record(report, "j_tangency", model.tangency_residual(p, jx));
      record(report, "j_parallel", complex_structure_parallelism(model, p, x, y));
    }

    if (product) {
      if (auto analytic = model.analytic_riemann_xyxy(p, x, y))
        record(report, "product_curvature", std::abs(rm - *analytic));
    }

    if (auto shape = model.shape_operator(p)) {
      record(report, "shape_symmetry", (*shape - shape->transpose()).cwiseAbs().maxCoeff());
    }
  }
  if (report.samples == 0) {
    report.min_sectional = 0.0;
    report.max_sectional = 0.0;
  }
  return report;
}

}  // namespace minidx
