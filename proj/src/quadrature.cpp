#include "minidx/quadrature.hpp"

#include "minidx/errors.hpp"

#include <cmath>

namespace minidx {

std::string to_string(AxisKind kind) {
  switch (kind) {
    case AxisKind::Periodic: return "periodic";
    case AxisKind::Colatitude: return "colatitude";
    case AxisKind::HopfEta: return "hopf-eta";
  }
  return "unknown";
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int count) {
  if (count < 1) throw ResolutionTooSmall("Gauss-Legendre rule needs at least one node");
  Eigen::VectorXd x(count), w(count);
  for (int i = 0; i < count; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double z = std::cos(M_PI * (i + 0.75) / (count + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= count; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = count * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x(count - 1 - i) = z;
    w(count - 1 - i) = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

ParamAxis make_axis(AxisKind kind, int count) {
  ParamAxis axis;
  axis.kind = kind;
  switch (kind) {
    case AxisKind::Periodic: {
      if (count < 3) throw ResolutionTooSmall("periodic axis needs at least 3 nodes");
      axis.nodes = Eigen::VectorXd::LinSpaced(count, 0.0, 2.0 * M_PI * (count - 1) / count);
      axis.weights = Eigen::VectorXd::Constant(count, 2.0 * M_PI / count);
      break;
    }
    case AxisKind::Colatitude: {
      if (count < 2) throw ResolutionTooSmall("colatitude axis needs at least 2 nodes");
      auto [x, w] = gauss_legendre(count);
      axis.nodes.resize(count);
      axis.weights.resize(count);
      // Ascending phi: x = cos(phi) descending.
      for (int i = 0; i < count; ++i) {
        double c = x(count - 1 - i);
        double phi = std::acos(c);
        axis.nodes(i) = phi;
        axis.weights(i) = w(count - 1 - i) / std::sin(phi);
      }
      break;
    }
    case AxisKind::HopfEta: {
      if (count < 2) throw ResolutionTooSmall("Hopf axis needs at least 2 nodes");
      auto [x, w] = gauss_legendre(count);
      axis.nodes.resize(count);
      axis.weights.resize(count);
      for (int i = 0; i < count; ++i) {
        double s = 0.5 * (x(i) + 1.0);  // s = sin^2(eta) in (0, 1)
        double eta = std::asin(std::sqrt(s));
        axis.nodes(i) = eta;
        axis.weights(i) = 0.5 * w(i) / (2.0 * std::sin(eta) * std::cos(eta));
      }
      break;
    }
  }
  return axis;
}

}  // namespace minidx
