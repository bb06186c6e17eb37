#pragma once

// Triangulation of a two-dimensional structured hypersurface mesh. Quads are
// split along one diagonal; Colatitude axes are closed with two pole vertices.
// Triangles carry the flat (polyhedral) metric of their R^d embedding.

#include "minidx/hypersurface.hpp"

#include <array>
#include <vector>

namespace minidx {

struct TriMesh {
  Mat vertices;        // d x V
  Mat vertex_param;    // 2 x V (poles get theta = 0)
  std::vector<int> node_of_vertex;  // -1 for pole vertices
  std::vector<int> vertex_of_node;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise in parameter space
  std::vector<std::array<int, 2>> edges;      // (i, j) with i < j
  std::vector<std::array<int, 3>> triangle_edges;  // edges (01, 12, 20)
  std::vector<std::array<int, 3>> triangle_edge_signs;  // +1 when edge runs along the triangle
  std::vector<bool> touches_pole;
  std::array<bool, 2> periodic{false, false};

  int vertex_count() const { return static_cast<int>(vertices.cols()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }

  double area(int t) const;
  /// Parameter displacement of vertex b relative to vertex a, unwrapped on
  /// periodic axes.
  Eigen::Vector2d param_delta(int a, int b) const;

  int euler_characteristic() const { return vertex_count() - edge_count() + triangle_count(); }
};

/// Requires hyp.dim() == 2.
TriMesh triangulate(const DiscreteHypersurface& hyp);

}  // namespace minidx
