#pragma once

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace xdg {

using Point = Eigen::VectorXd;

/// Axis-aligned box [lo, hi] in D dimensions.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const { return (hi - lo).prod(); }
  Eigen::VectorXd width() const { return hi - lo; }
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol = 1e-12) const;
  /// Smallest box containing both.
  Box merged(const Box& other) const;
};

/// Face of the background mesh. Interior faces have `out >= 0` and the normal
/// points from `in` (the lower-index cell) to `out` along `axis`. Boundary
/// faces have `out == -1`; `side` is 0 for the low and 1 for the high wall.
struct Face {
  int in = -1;
  int out = -1;
  int axis = 0;
  int side = 1;

  bool boundary() const { return out < 0; }
  double normal_sign() const { return boundary() && side == 0 ? -1.0 : 1.0; }
};

/// Cartesian cell partition of a box; cells are ordered lexicographically
/// with the x index running fastest.
class BackgroundMesh {
 public:
  BackgroundMesh(Box box, std::vector<int> cells_per_axis);

  int dim() const { return static_cast<int>(cells_.size()); }
  int num_cells() const { return num_cells_; }
  const Box& box() const { return box_; }
  const std::vector<int>& cells_per_axis() const { return cells_; }
  const Eigen::VectorXd& cell_width() const { return h_; }
  double cell_volume() const { return h_.prod(); }

  std::array<int, 3> cell_coords(int j) const;
  int cell_index(const std::array<int, 3>& coords) const;
  Box cell_box(int j) const;
  /// Cell containing x (clamped to the domain).
  int locate(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// All faces: interior faces first (by in-cell, then axis), then boundary faces.
  const std::vector<Face>& faces() const { return faces_; }
  Box face_box(const Face& f) const;
  /// (D-1)-measure of a full face orthogonal to `axis`.
  double face_area(int axis) const;

 private:
  Box box_;
  std::vector<int> cells_;
  int num_cells_ = 0;
  Eigen::VectorXd h_;
  std::vector<Face> faces_;
};

using Edge = std::pair<int, int>;

/// Undirected graph of face-adjacent cells; edges stored with first < second.
struct MeshGraph {
  int num_nodes = 0;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> neighbors;

  bool has_edge(int a, int b) const;
};

/// Set of graph edges whose connected components are the aggregates.
struct AggregationMap {
  std::vector<Edge> edges;
};

struct Aggregate {
  std::vector<int> cells;  // sorted ascending
  int representative() const { return cells.front(); }
};

BackgroundMesh build_cartesian(const Box& box, const std::vector<int>& cells_per_axis);
BackgroundMesh build_cartesian(double lo, double hi, int cells, int dim);

MeshGraph mesh_graph(const BackgroundMesh& mesh);

/// Connected components of the map's edges over all graph nodes, ordered by
/// representative. Throws InvalidMap for edges that are not graph edges.
std::vector<Aggregate> connected_components(const MeshGraph& graph, const AggregationMap& map);

/// Components of an arbitrary edge list over `num_nodes` nodes (no validation).
std::vector<Aggregate> components(int num_nodes, const std::vector<Edge>& edges);

/// Nested maps A^1 = {} c A^2 c ... c A^levels from index-block grouping:
/// level l groups 2^(l-1) cells per axis, the remainder joins the last block.
std::vector<AggregationMap> build_multigrid_aggregation_sequence(const BackgroundMesh& mesh,
                                                                 int num_levels);

}  // namespace xdg
