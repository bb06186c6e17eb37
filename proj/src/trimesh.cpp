#include "minidx/trimesh.hpp"

#include "minidx/errors.hpp"

#include <cmath>
#include <map>

namespace minidx {

double TriMesh::area(int t) const {
  const auto& tri = triangles[t];
  Vec a = vertices.col(tri[1]) - vertices.col(tri[0]);
  Vec b = vertices.col(tri[2]) - vertices.col(tri[0]);
  double ab = a.dot(b);
  return 0.5 * std::sqrt(std::max(0.0, a.squaredNorm() * b.squaredNorm() - ab * ab));
}

Eigen::Vector2d TriMesh::param_delta(int a, int b) const {
  Eigen::Vector2d d = vertex_param.col(b) - vertex_param.col(a);
  for (int k = 0; k < 2; ++k)
    if (periodic[k]) d(k) = std::remainder(d(k), 2.0 * M_PI);
  return d;
}

TriMesh triangulate(const DiscreteHypersurface& hyp) {
  if (hyp.dim() != 2) throw InvalidDimension("triangulation needs a two-dimensional mesh");
  const ParamAxis& ax0 = hyp.axes[0];
  const ParamAxis& ax1 = hyp.axes[1];
  if (ax1.kind != AxisKind::Periodic)
    throw IncompatibleKind("second axis must be periodic for triangulation");
  const bool closed0 = ax0.kind == AxisKind::Periodic;
  if (!closed0 && ax0.kind != AxisKind::Colatitude)
    throw IncompatibleKind("first axis must be periodic or colatitude");

  TriMesh mesh;
  mesh.periodic = {closed0, true};
  const int n0 = ax0.size(), n1 = ax1.size();
  const int nodes = hyp.node_count();
  const int poles = closed0 ? 0 : 2;
  const int d = hyp.embed_dim();
  mesh.vertices.resize(d, nodes + poles);
  mesh.vertex_param.resize(2, nodes + poles);
  mesh.node_of_vertex.assign(nodes + poles, -1);
  mesh.vertex_of_node.resize(nodes);
  for (int a = 0; a < nodes; ++a) {
    mesh.vertices.col(a) = hyp.position(a);
    mesh.vertex_param.col(a) = hyp.param.col(a);
    mesh.node_of_vertex[a] = a;
    mesh.vertex_of_node[a] = a;
  }
  int north = -1, south = -1;
  if (!closed0) {
    north = nodes;
    south = nodes + 1;
    Vec tn(2), ts(2);
    tn << 0.0, 0.0;
    ts << M_PI, 0.0;
    mesh.vertices.col(north) = hyp.point_at(tn).position;
    mesh.vertices.col(south) = hyp.point_at(ts).position;
    mesh.vertex_param.col(north) = tn;
    mesh.vertex_param.col(south) = ts;
  }

  auto node = [&](int i, int j) { return hyp.node_index({i, (j % n1 + n1) % n1}); };
  auto add = [&](int a, int b, int c, bool pole) {
    mesh.triangles.push_back({a, b, c});
    mesh.touches_pole.push_back(pole);
  };
  const int rows = closed0 ? n0 : n0 - 1;
  for (int i = 0; i < rows; ++i) {
    int ip = (i + 1) % n0;
    for (int j = 0; j < n1; ++j) {
      int a = node(i, j), b = node(ip, j), c = node(ip, j + 1), e = node(i, j + 1);
      add(a, b, c, false);
      add(a, c, e, false);
    }
  }
  if (!closed0) {
    for (int j = 0; j < n1; ++j) {
      add(north, node(0, j), node(0, j + 1), true);
      add(south, node(n0 - 1, j + 1), node(n0 - 1, j), true);
    }
  }

  std::map<std::pair<int, int>, int> edge_id;
  mesh.triangle_edges.resize(mesh.triangles.size());
  mesh.triangle_edge_signs.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int u = tri[k], v = tri[(k + 1) % 3];
      std::pair<int, int> key = u < v ? std::make_pair(u, v) : std::make_pair(v, u);
      auto [it, inserted] = edge_id.emplace(key, static_cast<int>(mesh.edges.size()));
      if (inserted) mesh.edges.push_back({key.first, key.second});
      mesh.triangle_edges[t][k] = it->second;
      mesh.triangle_edge_signs[t][k] = u < v ? 1 : -1;
    }
  }
  return mesh;
}

}  // namespace minidx
