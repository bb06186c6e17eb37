#include "minidx/bounds.hpp"

#include "minidx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace minidx {

namespace {

long long ceil_times(const Rational& c, long long q) {
  Rational v = c * q;
  long long num = v.numerator(), den = v.denominator();
  return num >= 0 ? (num + den - 1) / den : -((-num) / den);
}

double to_double(const Rational& r) { return double(r.numerator()) / double(r.denominator()); }

Rational two_over_pair(long long d) { return Rational(2, d * (d - 1)); }

struct Stats {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  int count = 0;
  void add(double v) {
    min = std::min(min, v);
    max = std::max(max, v);
    sum += v;
    ++count;
  }
  void fill(MarginReport& r) const {
    r.min = min;
    r.max = max;
    r.mean = count ? sum / count : 0.0;
    r.samples = count;
  }
};

}  // namespace

std::string to_string(CertificateMode m) {
  return m == CertificateMode::Wedge ? "wedge" : "star";
}

CertificateMode certificate_mode_from_string(const std::string& s) {
  if (s == "wedge") return CertificateMode::Wedge;
  if (s == "star") return CertificateMode::Star;
  throw IncompatibleKind("unknown certificate mode '" + s + "'");
}

CertificateReport concentration_certificate(const DiscreteHypersurface& hyp,
                                            const std::vector<DiscreteOneForm>& forms, double eta,
                                            CertificateMode mode, const SpectrumReport& spectrum) {
  if (mode == CertificateMode::Star && hyp.dim() != 2)
    throw InvalidDimension("the star certificate needs a surface");
  CertificateReport r;
  r.mode = mode;
  r.eta = eta;
  r.q = static_cast<int>(forms.size());
  r.d = hyp.embed_dim();
  const long long d = r.d;
  r.required_exact = mode == CertificateMode::Wedge ? Rational(2 * r.q, d * (d - 1))
                                                    : Rational(r.q, 2 * d);
  r.required_value = to_double(r.required_exact);
  r.required = static_cast<int>(ceil_times(r.required_exact, 1));

  const double scale = mode == CertificateMode::Wedge ? 1.0 : 2.0;
  IntegrandForm form = integrand_quadratic_form(
      hyp, forms, mode == CertificateMode::Wedge ? IntegrandKind::Wedge
                                                 : IntegrandKind::CoordinatesWithStar);
  Eigen::SelfAdjointEigenSolver<Mat> es(form.gram - scale * eta * form.mass);
  r.hypothesis_margin = es.eigenvalues().maxCoeff();
  r.normalized_margin = form.max_ratio() / scale - eta;

  r.actual = spectrum.count_below(eta);
  r.count_complete = spectrum.complete ||
                     (spectrum.eigenvalues.size() > 0 &&
                      spectrum.eigenvalues(spectrum.eigenvalues.size() - 1) >= eta);
  r.pass = r.hypothesis_margin < 0.0 && r.actual >= r.required;
  return r;
}

// ---------------------------------------------------------------------------

std::string to_string(ConstantFamily f) {
  switch (f) {
    case ConstantFamily::Sphere: return "sphere";
    case ConstantFamily::RealProjective: return "real-projective";
    case ConstantFamily::ComplexProjective: return "complex-projective";
    case ConstantFamily::QuaternionicProjective: return "quaternionic-projective";
    case ConstantFamily::CayleyPlane: return "cayley-plane";
    case ConstantFamily::CircleTimesSphere: return "circle-times-sphere";
    case ConstantFamily::SphereTimesSphere: return "sphere-times-sphere";
    case ConstantFamily::EuclideanHypersurface: return "euclidean-hypersurface";
  }
  return "unknown";
}

TheoremConstant theorem_constant(ConstantFamily family, int a, int b, bool totally_geodesic) {
  TheoremConstant c;
  c.family = family;
  const long long x = a, y = b;
  switch (family) {
    case ConstantFamily::Sphere:
    case ConstantFamily::RealProjective:
      if (a < 1) throw InvalidDimension("sphere family needs n >= 1");
      c.d = x + 2;
      c.stated = Rational(2, (x + 2) * (x + 1));
      c.label = std::string(family == ConstantFamily::Sphere ? "S^" : "RP^") + std::to_string(a + 1);
      if (family == ConstantFamily::Sphere && !totally_geodesic) c.offset = a + 2;
      break;
    case ConstantFamily::ComplexProjective:
      if (a < 1) throw InvalidDimension("CP^m needs m >= 1");
      c.d = (x + 1) * (x + 1);
      c.stated = Rational(2, x * (x + 2) * (x + 1) * (x + 1));
      c.label = "CP^" + std::to_string(a);
      break;
    case ConstantFamily::QuaternionicProjective:
      if (a < 1) throw InvalidDimension("HP^p needs p >= 1");
      c.d = (x + 1) * (2 * x + 1);
      c.stated = Rational(2, (2 * x + 3) * (2 * x + 1) * (x + 1) * x);
      c.label = "HP^" + std::to_string(a);
      break;
    case ConstantFamily::CayleyPlane:
      c.d = 27;
      c.stated = Rational(1, 351);
      c.label = "CaP^2";
      c.note = "no chart; table value only";
      break;
    case ConstantFamily::CircleTimesSphere:
      if (a < 2) throw InvalidDimension("S^1 x S^n needs n >= 2");
      c.d = x + 3;
      c.stated = Rational(2, (x + 3) * (x + 2));
      c.label = "S^1xS^" + std::to_string(a);
      break;
    case ConstantFamily::SphereTimesSphere:
      if (a < 1 || b < 1) throw InvalidDimension("S^p x S^q needs p, q >= 1");
      c.d = x + y + 2;
      c.stated = Rational(2, (x + y + 2) * (x + y + 1));
      c.label = "S^" + std::to_string(a) + "xS^" + std::to_string(b);
      if (a == 2 && b == 2) {
        c.applies = false;
        c.note = "S^2 x S^2 is excluded; no bound claimed";
      }
      break;
    case ConstantFamily::EuclideanHypersurface:
      if (a < 1) throw InvalidDimension("hypersurface family needs n >= 1");
      c.d = x + 2;
      c.stated = two_over_pair(x + 2);
      c.label = "N^" + std::to_string(a + 1) + " in R^" + std::to_string(a + 2);
      break;
  }
  c.from_d = two_over_pair(c.d);
  return c;
}

TheoremConstant theorem_constant(const AmbientModel& ambient, bool totally_geodesic) {
  const int dim = ambient.intrinsic_dim();
  TheoremConstant c;
  switch (ambient.kind()) {
    case AmbientKind::Sphere:
      c = theorem_constant(ConstantFamily::Sphere, dim - 1, 0, totally_geodesic);
      break;
    case AmbientKind::RealProjective:
      c = theorem_constant(ConstantFamily::RealProjective, dim - 1);
      break;
    case AmbientKind::ComplexProjectiveVeronese:
      c = theorem_constant(ConstantFamily::ComplexProjective, dim / 2);
      break;
    case AmbientKind::QuaternionicProjectiveVeronese:
      c = theorem_constant(ConstantFamily::QuaternionicProjective, dim / 4);
      break;
    case AmbientKind::CircleTimesSphere:
      c = theorem_constant(ConstantFamily::CircleTimesSphere, dim - 1);
      break;
    case AmbientKind::SphereTimesSphere: {
      auto f = ambient.factor_dims();
      if (f.size() != 2) throw IncompatibleKind("product ambient without factor dimensions");
      c = theorem_constant(ConstantFamily::SphereTimesSphere, f[0], f[1]);
      break;
    }
    case AmbientKind::Ellipsoid:
    case AmbientKind::GenericEmbeddedHypersurface:
      c = theorem_constant(ConstantFamily::EuclideanHypersurface, dim - 1);
      break;
  }
  // The consistency check runs against the model's actual embedding dimension.
  c.from_d = two_over_pair(ambient.embed_dim());
  if (c.d != ambient.embed_dim())
    c.note += (c.note.empty() ? "" : "; ") + std::string("embedding dimension differs from the family's d");
  c.d = ambient.embed_dim();
  return c;
}

std::vector<TheoremConstant> constant_table(int max_param) {
  std::vector<TheoremConstant> out;
  for (int a = 1; a <= max_param; ++a) {
    out.push_back(theorem_constant(ConstantFamily::Sphere, a));
    out.push_back(theorem_constant(ConstantFamily::RealProjective, a));
    out.push_back(theorem_constant(ConstantFamily::ComplexProjective, a));
    out.push_back(theorem_constant(ConstantFamily::QuaternionicProjective, a));
    if (a >= 2) out.push_back(theorem_constant(ConstantFamily::CircleTimesSphere, a));
    out.push_back(theorem_constant(ConstantFamily::EuclideanHypersurface, a));
    for (int b = a; b <= max_param; ++b)
      out.push_back(theorem_constant(ConstantFamily::SphereTimesSphere, a, b));
  }
  out.push_back(theorem_constant(ConstantFamily::CayleyPlane, 2));
  return out;
}

IndexBoundReport index_bound_report(const DiscreteHypersurface& hyp, int betti, int index) {
  IndexBoundReport r;
  const bool totally_geodesic = hyp.shape_norm2.maxCoeff() < 1e-8;
  r.constant = theorem_constant(*hyp.ambient, totally_geodesic);
  r.betti = betti;
  r.index = index;
  r.value = to_double(r.constant.stated) * betti + r.constant.offset;
  r.bound = static_cast<int>(ceil_times(r.constant.stated, betti)) + r.constant.offset;
  r.consistent = r.constant.applies && index >= r.bound;
  r.tight = r.consistent && index == r.bound;
  return r;
}

// ---------------------------------------------------------------------------

MarginReport integrand_margin(const DiscreteHypersurface& hyp, const DiscreteOneForm& form,
                              IntegrandKind kind, double threshold) {
  MarginReport r;
  r.id = "integrand-" + to_string(kind);
  const double top = form.components.colwise().squaredNorm().maxCoeff();
  if (!(top > 0.0)) throw NotHarmonic("integrand margin of the zero form");
  Stats s;
  for (int a = 0; a < hyp.node_count(); ++a) {
    const Vec c = form.components.col(a);
    const double w2 = c.squaredNorm();
    if (w2 <= 1e-12 * top) continue;
    s.add(pointwise_integrand(hyp, a, c, kind) / w2);
  }
  s.fill(r);
  r.values["threshold"] = threshold;
  r.pass = r.max < threshold;
  return r;
}

MarginReport sphere_margin(const DiscreteHypersurface& hyp, const DiscreteOneForm& form) {
  const AmbientKind k = hyp.ambient->kind();
  if (k != AmbientKind::Sphere && k != AmbientKind::RealProjective)
    throw IncompatibleKind("the sphere margin needs a round ambient");
  const int n = hyp.dim();
  const double expected = -(2.0 * n - 2.0);
  MarginReport r = integrand_margin(hyp, form, IntegrandKind::Wedge, 0.0);
  r.id = "sphere";
  const double dev = std::max(std::abs(r.max - expected), std::abs(r.min - expected));
  r.values["expected"] = expected;
  r.values["max_deviation"] = dev;
  r.pass = dev < 1e-8 && expected < 0.0;
  return r;
}

MarginReport cross_margin(const AmbientModel& ambient, int samples, unsigned seed) {
  const AmbientKind kind = ambient.kind();
  if (kind != AmbientKind::ComplexProjectiveVeronese &&
      kind != AmbientKind::QuaternionicProjectiveVeronese)
    throw IncompatibleKind("the projective margin needs CP^m or HP^p");
  const int n = ambient.intrinsic_dim() - 1;
  const double big_k = *ambient.einstein_constant();
  const double bound = 8.0 / 3.0 * (n + 3 - big_k);
  Rng rng(seed);
  std::normal_distribution<double> g;

  Stats s;
  double aux1 = 0.0, aux2 = 0.0, jn_deficit = 0.0;
  double deficit_ratio = std::numeric_limits<double>::infinity();
  auto evaluate = [&](const AmbientPoint& p, const Vec& nv, const Mat& e, const Vec& w) {
    double iin = 0.0, iiw = 0.0, rm = 0.0;
    for (int k = 0; k < n; ++k) {
      Vec ek = e.col(k);
      iin += ambient.second_fundamental_form_unchecked(p, ek, nv).squaredNorm();
      iiw += ambient.second_fundamental_form_unchecked(p, ek, w).squaredNorm();
      rm += riemann_xyxy(ambient, p, ek, w);
    }
    const double ricn = ricci(ambient, p, nv);
    const double rnw = riemann_xyxy(ambient, p, nv, w);
    const double p1 = iin - ricn;
    const double p2 = iiw - rm;
    aux1 = std::max(aux1, std::abs(p1 - 4.0 / 3.0 * (n - big_k)));
    aux2 = std::max(aux2, std::abs(p2 - 4.0 / 3.0 * (n + 2 - big_k + rnw)));
    return p1 + p2;
  };

  for (int i = 0; i < samples; ++i) {
    AmbientPoint p = ambient.random_point(rng);
    Vec nv = ambient.random_tangent(p, rng).normalized();
    Mat f = frame_completing(ambient, p, nv);
    Mat e = f.rightCols(n);
    Vec coeff(n);
    for (int k = 0; k < n; ++k) coeff(k) = g(rng);
    Vec w = e * coeff.normalized();
    const double value = evaluate(p, nv, e, w);
    s.add(value);
    if (auto jn = ambient.complex_structure(p, nv)) {
      // Equality analysis: the deficit is controlled by the part of w off JN.
      const double along = w.dot(*jn);
      const double off2 = 1.0 - along * along;
      if (off2 > 1e-6) deficit_ratio = std::min(deficit_ratio, (bound - value) / off2);
      jn_deficit = std::max(jn_deficit, std::abs(bound - evaluate(p, nv, e, *jn)));
    }
  }
  MarginReport r;
  r.id = "cross";
  s.fill(r);
  r.values["bound"] = bound;
  r.values["n"] = n;
  r.values["einstein"] = big_k;
  r.values["aux_normal_residual"] = aux1;
  r.values["aux_form_residual"] = aux2;
  r.values["borderline"] = std::abs(bound) < 1e-12 ? 1.0 : 0.0;
  if (kind == AmbientKind::ComplexProjectiveVeronese) {
    r.values["equality_deficit_at_jn"] = jn_deficit;
    r.values["deficit_per_offset_min"] = deficit_ratio;
  }
  const bool within = r.max <= bound + 1e-9 && aux1 < 1e-8 && aux2 < 1e-8;
  if (std::abs(bound) < 1e-12) {
    r.note = "margin 0: strict by the equality analysis (w# = f JN), see the borderline report";
    r.pass = within && deficit_ratio > 1e-6 && jn_deficit < 1e-8;
  } else {
    r.pass = within && bound < 0.0;
  }
  return r;
}

MarginReport cayley_cross_margin() {
  MarginReport r;
  r.id = "cross";
  const int n = 15;
  const double big_k = 36.0;
  const double bound = 8.0 / 3.0 * (n + 3 - big_k);
  r.min = r.max = r.mean = bound;
  r.values["bound"] = bound;
  r.values["n"] = n;
  r.values["einstein"] = big_k;
  r.note = "table values; the Cayley plane has no chart";
  r.pass = bound < 0.0;
  return r;
}

double product_q(double theta, double phi) {
  const double c = std::cos(theta) * std::cos(theta);
  const double s = std::sin(phi) * std::sin(phi);
  return 1.0 + s * c * (2.0 * c - 1.0);
}

double product_q_definition(double theta, double phi) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(phi), sp = std::sin(phi);
  const double c2 = ct * ct, s2 = st * st;
  return c2 + s2 * cp * cp + sp * sp + c2 * c2 + s2 * s2 - 1.0 + 2.0 * c2 * s2 * cp * cp;
}

MarginReport product_q_margin(int grid, int samples, unsigned seed) {
  if (grid < 2) throw ResolutionTooSmall("q grid needs at least 2 points per side");
  MarginReport r;
  r.id = "product_q";
  Stats s;
  double best = std::numeric_limits<double>::infinity(), best_theta = 0.0, best_phi = 0.0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double th = M_PI * i / (grid - 1), ph = M_PI * j / (grid - 1);
      const double v = product_q(th, ph);
      s.add(v);
      if (v < best) {
        best = v;
        best_theta = th;
        best_phi = ph;
      }
    }
  s.fill(r);
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  double diff = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double th = u(rng), ph = u(rng);
    diff = std::max(diff, std::abs(product_q(th, ph) - product_q_definition(th, ph)));
  }
  r.values["bound"] = 0.875;
  r.values["argmin_cos2_theta"] = std::cos(best_theta) * std::cos(best_theta);
  r.values["argmin_phi"] = best_phi;
  r.values["definition_max_diff"] = diff;
  r.pass = std::abs(r.min - 0.875) < 1e-6 && r.min >= 0.875 - 1e-12 && diff < 1e-12;
  return r;
}

MarginReport convex_margin(const AmbientModel& ambient, int samples, unsigned seed) {
  const int dim = ambient.intrinsic_dim();  // n + 1
  Rng rng(seed);
  std::vector<AmbientPoint> points;
  for (int i = 0; i < samples; ++i) points.push_back(ambient.random_point(rng));
  if (!ambient.shape_operator(points.empty() ? ambient.random_point(rng) : points.front()))
    throw IncompatibleKind("the convexity margin needs a hypersurface of Euclidean space");
  if (ambient.kind() == AmbientKind::Ellipsoid) {
    // Axis endpoints, reached by projecting far points along the axes.
    AmbientPoint base = ambient.random_point(rng);
    for (int i = 0; i < ambient.embed_dim(); ++i)
      for (double sign : {1.0, -1.0}) {
        Vec target = Vec::Unit(ambient.embed_dim(), i) * sign * 1e3;
        points.push_back(ambient.curve(base, target - base.position, 1.0));
      }
  }
  Stats s;
  double max_ratio = 0.0;
  bool convex = true;
  for (const auto& p : points) {
    Mat a = *ambient.shape_operator(p);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()));
    const Vec k = es.eigenvalues();
    const double kmin = k.minCoeff(), kmax = k.maxCoeff();
    if (!(kmin > 0.0)) convex = false;
    s.add(4.0 * kmax * kmax - 2.0 * dim * kmin * kmin);
    if (kmin > 0.0) max_ratio = std::max(max_ratio, kmax / kmin);
  }
  MarginReport r;
  r.id = "convex";
  s.fill(r);
  const double threshold = std::sqrt(dim / 2.0);
  r.values["max_ratio"] = convex ? max_ratio : std::numeric_limits<double>::infinity();
  r.values["ratio_threshold"] = threshold;
  if (dim == 3) {
    r.values["refined_threshold"] = std::sqrt(5.0 / 3.0);
    r.values["refined_pass"] = convex && max_ratio < std::sqrt(5.0 / 3.0) ? 1.0 : 0.0;
  }
  if (!convex) r.note = "not strictly convex at some sample";
  r.pass = convex && max_ratio < threshold;
  return r;
}

MarginReport scalar3_margin(const AmbientModel& ambient, int samples, unsigned seed) {
  Rng rng(seed);
  Stats s;
  double contraction = 0.0;
  const bool applies = ambient.intrinsic_dim() == 3 && ambient.embed_dim() == 4;
  for (int i = 0; i < samples; ++i) {
    AmbientPoint p = ambient.random_point(rng);
    const double r = scalar_curvature(ambient, p);
    const double h2 = mean_curvature_vector(ambient, p).squaredNorm();
    const double ii2 = second_fundamental_form_norm2(ambient, p);
    contraction = std::max(contraction, std::abs(r - (h2 - ii2)));
    s.add(2.0 * r - h2);
  }
  MarginReport out;
  out.id = "scalar3";
  s.fill(out);
  out.values["contraction_residual"] = contraction;
  if (applies) {
    out.pass = out.min > 0.0 && contraction < 1e-8;
  } else {
    out.note = "pinching needs a three-dimensional ambient in R^4; contraction only";
    out.pass = contraction < 1e-8;
  }
  return out;
}

// ---------------------------------------------------------------------------

PositionField borderline_field(const std::string& spec, int embed_dim) {
  if (spec == "one") return [](const Vec&) { return 1.0; };
  if (spec == "zero") return [](const Vec&) { return 0.0; };
  if (spec.rfind("coord:", 0) == 0) {
    int i = -1;
    try {
      i = std::stoi(spec.substr(6));
    } catch (const std::exception&) {
      throw IncompatibleKind("bad coordinate field '" + spec + "'");
    }
    if (i < 0 || i >= embed_dim) throw InvalidDimension("coordinate index out of range");
    return [i](const Vec& x) { return x(i); };
  }
  throw IncompatibleKind("unknown field '" + spec + "' (one, zero, coord:i)");
}

double BorderlineReport::max_residual() const {
  return std::max({divergence, decomposition, traced_gauss, ambient_chain, jn_tangency,
                   mean_curvature});
}

BorderlineReport borderline_cp_report(const DiscreteHypersurface& hyp, const PositionField& f) {
  const AmbientModel& model = *hyp.ambient;
  if (!model.complex_structure(hyp.points[0], hyp.normal.col(0)))
    throw MissingStructure("ambient has no complex structure");
  BorderlineReport r;
  r.m = model.intrinsic_dim() / 2;
  r.mean_curvature = hyp.mean_curvature_residual();
  const double target = 2.0 * r.m - 2.0;

  auto jn = [&](const Vec& t) -> Vec {
    return *model.complex_structure(hyp.point_at(t), hyp.chart.normal(t));
  };
  auto fval = [&](const Vec& t) -> Vec {
    Vec v(1);
    v(0) = f(hyp.point_at(t).position);
    return v;
  };
  auto omega = [&](const Vec& t) -> Vec { return f(hyp.point_at(t).position) * jn(t); };

  const int n = hyp.dim();
  for (int a = 0; a < hyp.node_count(); ++a) {
    const Mat& e = hyp.frame[a];
    const Vec nv = hyp.normal.col(a);
    const Vec u = *model.complex_structure(hyp.points[a], nv);
    r.jn_tangency = std::max(r.jn_tangency, std::abs(u.dot(nv)));

    Mat du = hyp.frame_derivative(a, jn);
    double div = 0.0;
    for (int k = 0; k < n; ++k) div += e.col(k).dot(du.col(k));
    r.divergence = std::max(r.divergence, std::abs(div));

    const double fa = f(hyp.position(a));
    Mat df = hyp.frame_derivative(a, fval);
    Mat dw = hyp.frame_derivative(a, omega);
    for (int k = 0; k < n; ++k) {
      const double lhs = (e.transpose() * dw.col(k)).squaredNorm();
      const double rhs = df(0, k) * df(0, k) + fa * fa * (e.transpose() * du.col(k)).squaredNorm();
      r.decomposition = std::max(r.decomposition, std::abs(lhs - rhs));
    }

    const Vec uf = e.transpose() * u;
    const double ric_m = intrinsic_ricci(hyp, a, uf);
    const double au = (hyp.shape[a] * uf).squaredNorm();
    r.traced_gauss = std::max(r.traced_gauss, std::abs(ric_m + au - target));
    const double chain = ricci(model, hyp.points[a], u) - riemann_xyxy(model, hyp.points[a], u, nv);
    r.ambient_chain = std::max(r.ambient_chain, std::abs(chain - target));
  }
  return r;
}

bool residual_decays(double coarse, double fine, double floor) {
  return fine < floor || fine <= 0.5 * coarse;
}

}  // namespace minidx
