#pragma once

// One-dimensional parameter axes for tensor-product meshes. The node weights
// integrate d(parameter); the induced-metric factor sqrt(det g) is applied by
// the mesh builder.

#include <Eigen/Dense>

#include <string>
#include <utility>

namespace minidx {

enum class AxisKind {
  Periodic,    // [0, 2 pi), uniform nodes, trapezoid rule
  Colatitude,  // phi in (0, pi), Gauss-Legendre in cos(phi)
  HopfEta,     // eta in (0, pi/2), Gauss-Legendre in sin^2(eta)
};

std::string to_string(AxisKind kind);

struct ParamAxis {
  AxisKind kind = AxisKind::Periodic;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int count);

ParamAxis make_axis(AxisKind kind, int count);

}  // namespace minidx
