#include "xdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xdg/error.hpp"

namespace xdg {

bool Box::contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol) const {
  for (int d = 0; d < dim(); ++d) {
    const double t = tol * std::max(1.0, hi[d] - lo[d]);
    if (x[d] < lo[d] - t || x[d] > hi[d] + t) return false;
  }
  return true;
}

Box Box::merged(const Box& other) const {
  return Box{lo.cwiseMin(other.lo), hi.cwiseMax(other.hi)};
}

BackgroundMesh::BackgroundMesh(Box box, std::vector<int> cells_per_axis)
    : box_(std::move(box)), cells_(std::move(cells_per_axis)) {
  const int D = static_cast<int>(cells_.size());
  if (D < 1 || D > 3 || box_.dim() != D || box_.hi.size() != D)
    throw Error(ErrorKind::InvalidDomain, "dimension must be 1..3 and match the box");
  for (int d = 0; d < D; ++d) {
    if (cells_[d] < 1)
      throw Error(ErrorKind::InvalidDomain, "cells per axis must be >= 1 (axis " + std::to_string(d) + ")");
    if (!(box_.hi[d] > box_.lo[d]))
      throw Error(ErrorKind::InvalidDomain, "degenerate box along axis " + std::to_string(d));
  }
  num_cells_ = std::accumulate(cells_.begin(), cells_.end(), 1, std::multiplies<>());
  h_.resize(D);
  for (int d = 0; d < D; ++d) h_[d] = (box_.hi[d] - box_.lo[d]) / cells_[d];

  for (int j = 0; j < num_cells_; ++j) {
    auto c = cell_coords(j);
    for (int d = 0; d < D; ++d) {
      if (c[d] + 1 < cells_[d]) {
        auto n = c;
        ++n[d];
        faces_.push_back(Face{j, cell_index(n), d, 1});
      }
    }
  }
  for (int j = 0; j < num_cells_; ++j) {
    auto c = cell_coords(j);
    for (int d = 0; d < D; ++d) {
      if (c[d] == 0) faces_.push_back(Face{j, -1, d, 0});
      if (c[d] + 1 == cells_[d]) faces_.push_back(Face{j, -1, d, 1});
    }
  }
}

std::array<int, 3> BackgroundMesh::cell_coords(int j) const {
  std::array<int, 3> c{0, 0, 0};
  for (int d = 0; d < dim(); ++d) {
    c[d] = j % cells_[d];
    j /= cells_[d];
  }
  return c;
}

int BackgroundMesh::cell_index(const std::array<int, 3>& coords) const {
  int j = 0;
  for (int d = dim() - 1; d >= 0; --d) j = j * cells_[d] + coords[d];
  return j;
}

Box BackgroundMesh::cell_box(int j) const {
  const auto c = cell_coords(j);
  Box b{Eigen::VectorXd(dim()), Eigen::VectorXd(dim())};
  for (int d = 0; d < dim(); ++d) {
    b.lo[d] = box_.lo[d] + c[d] * h_[d];
    b.hi[d] = c[d] + 1 == cells_[d] ? box_.hi[d] : box_.lo[d] + (c[d] + 1) * h_[d];
  }
  return b;
}

int BackgroundMesh::locate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::array<int, 3> c{0, 0, 0};
  for (int d = 0; d < dim(); ++d) {
    const int i = static_cast<int>(std::floor((x[d] - box_.lo[d]) / h_[d]));
    c[d] = std::clamp(i, 0, cells_[d] - 1);
  }
  return cell_index(c);
}

Box BackgroundMesh::face_box(const Face& f) const {
  Box b = cell_box(f.in);
  if (f.boundary() && f.side == 0)
    b.hi[f.axis] = b.lo[f.axis];
  else
    b.lo[f.axis] = b.hi[f.axis];
  return b;
}

double BackgroundMesh::face_area(int axis) const {
  double a = 1.0;
  for (int d = 0; d < dim(); ++d)
    if (d != axis) a *= h_[d];
  return a;
}

BackgroundMesh build_cartesian(const Box& box, const std::vector<int>& cells_per_axis) {
  return BackgroundMesh(box, cells_per_axis);
}

BackgroundMesh build_cartesian(double lo, double hi, int cells, int dim) {
  return BackgroundMesh(Box{Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi)},
                        std::vector<int>(dim, cells));
}

bool MeshGraph::has_edge(int a, int b) const {
  if (a < 0 || b < 0 || a >= num_nodes || b >= num_nodes) return false;
  const auto& n = neighbors[a];
  return std::find(n.begin(), n.end(), b) != n.end();
}

MeshGraph mesh_graph(const BackgroundMesh& mesh) {
  MeshGraph g;
  g.num_nodes = mesh.num_cells();
  g.neighbors.resize(g.num_nodes);
  for (const Face& f : mesh.faces()) {
    if (f.boundary()) continue;
    g.edges.emplace_back(std::min(f.in, f.out), std::max(f.in, f.out));
    g.neighbors[f.in].push_back(f.out);
    g.neighbors[f.out].push_back(f.in);
  }
  std::sort(g.edges.begin(), g.edges.end());
  for (auto& n : g.neighbors) std::sort(n.begin(), n.end());
  return g;
}

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;  // root is always the minimum index
  }
};

}  // namespace

std::vector<Aggregate> components(int num_nodes, const std::vector<Edge>& edges) {
  DisjointSets sets(num_nodes);
  for (const auto& [a, b] : edges) sets.unite(a, b);
  std::vector<int> slot(num_nodes, -1);
  std::vector<Aggregate> out;
  for (int i = 0; i < num_nodes; ++i) {
    const int root = sets.find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[slot[root]].cells.push_back(i);
  }
  return out;
}

std::vector<Aggregate> connected_components(const MeshGraph& graph, const AggregationMap& map) {
  for (const auto& [a, b] : map.edges) {
    if (!graph.has_edge(a, b))
      throw Error(ErrorKind::InvalidMap,
                  "edge {" + std::to_string(a) + "," + std::to_string(b) + "} is not a mesh-graph edge");
  }
  return components(graph.num_nodes, map.edges);
}

std::vector<AggregationMap> build_multigrid_aggregation_sequence(const BackgroundMesh& mesh,
                                                                 int num_levels) {
  if (num_levels < 1) throw Error(ErrorKind::InvalidConfig, "number of multigrid levels must be >= 1");
  const MeshGraph graph = mesh_graph(mesh);
  const int D = mesh.dim();
  std::vector<AggregationMap> seq;
  seq.reserve(num_levels);
  seq.push_back(AggregationMap{});
  for (int level = 2; level <= num_levels; ++level) {
    const int width = 1 << (level - 1);
    auto block_of = [&](int j) {
      const auto c = mesh.cell_coords(j);
      std::array<int, 3> b{0, 0, 0};
      for (int d = 0; d < D; ++d) {
        const int nblocks = std::max(1, mesh.cells_per_axis()[d] / width);
        b[d] = std::min(c[d] / width, nblocks - 1);
      }
      return b;
    };
    AggregationMap map;
    for (const auto& e : graph.edges)
      if (block_of(e.first) == block_of(e.second)) map.edges.push_back(e);
    seq.push_back(std::move(map));
  }
  return seq;
}

}  // namespace xdg
