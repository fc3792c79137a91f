#include <algorithm>
#include <set>

#include <doctest.h>

#include "support.hpp"
#include "xdg/mesh.hpp"

using namespace xdg;
using test::box;
using test::error_kind;

namespace {

// Face-adjacent pairs of an n0 x n1 x n2 grid: (n_a - 1) times the other extents, summed over axes.
int expected_edges(const std::vector<int>& n) {
  int total = 0;
  for (std::size_t a = 0; a < n.size(); ++a) {
    int e = n[a] - 1;
    for (std::size_t b = 0; b < n.size(); ++b)
      if (b != a) e *= n[b];
    total += e;
  }
  return total;
}

std::set<std::vector<int>> as_sets(const std::vector<Aggregate>& aggs) {
  std::set<std::vector<int>> out;
  for (const auto& a : aggs) out.insert(a.cells);
  return out;
}

}  // namespace

TEST_CASE("cartesian mesh volumes and cell boxes") {
  const BackgroundMesh m2 = build_cartesian(box({0, 0}, {2, 2}), {2, 2});
  CHECK(m2.num_cells() == 4);
  for (int j = 0; j < 4; ++j) CHECK(m2.cell_box(j).volume() == doctest::Approx(1.0));
  CHECK(m2.cell_box(1).lo[0] == doctest::Approx(1.0));
  CHECK(m2.cell_box(2).lo[1] == doctest::Approx(1.0));

  const BackgroundMesh m3 = build_cartesian(-1.0, 1.0, 2, 3);
  CHECK(m3.num_cells() == 8);
  double total = 0.0;
  for (int j = 0; j < 8; ++j) total += m3.cell_box(j).volume();
  CHECK(total == doctest::Approx(8.0));
}

TEST_CASE("cartesian mesh rejects empty or degenerate domains") {
  CHECK(error_kind([] { build_cartesian(box({0, 0}, {1, 1}), {0, 1}); }) == ErrorKind::InvalidDomain);
  CHECK(error_kind([] { build_cartesian(box({0, 0}, {0, 1}), {1, 1}); }) == ErrorKind::InvalidDomain);
}

TEST_CASE("cell index and coordinates are inverse") {
  const BackgroundMesh m = build_cartesian(box({0, 0, 0}, {3, 4, 5}), {3, 4, 5});
  for (int j = 0; j < m.num_cells(); ++j) {
    CHECK(m.cell_index(m.cell_coords(j)) == j);
    CHECK(m.locate(m.cell_box(j).center()) == j);
  }
}

TEST_CASE("mesh graph edge counts") {
  CHECK(mesh_graph(build_cartesian(box({0, 0}, {2, 2}), {2, 2})).edges.size() == 4);
  CHECK(mesh_graph(build_cartesian(-1.0, 1.0, 2, 3)).edges.size() == 12);
  CHECK(mesh_graph(build_cartesian(box({0, 0}, {1, 1}), {1, 1})).edges.empty());
  for (int a = 1; a <= 5; ++a)
    for (int b = 1; b <= 4; ++b) {
      CHECK(mesh_graph(build_cartesian(box({0, 0}, {1, 1}), {a, b})).edges.size() ==
            static_cast<std::size_t>(expected_edges({a, b})));
      for (int c = 1; c <= 3; ++c)
        CHECK(mesh_graph(build_cartesian(box({0, 0, 0}, {1, 1, 1}), {a, b, c})).edges.size() ==
              static_cast<std::size_t>(expected_edges({a, b, c})));
    }
}

TEST_CASE("mesh graph edges join face neighbours only") {
  const BackgroundMesh m = build_cartesian(box({0, 0, 0}, {1, 1, 1}), {3, 2, 4});
  const MeshGraph g = mesh_graph(m);
  for (const auto& [a, b] : g.edges) {
    CHECK(a < b);
    const auto ca = m.cell_coords(a), cb = m.cell_coords(b);
    int dist = 0;
    for (int d = 0; d < 3; ++d) dist += std::abs(ca[d] - cb[d]);
    CHECK(dist == 1);
    CHECK(g.has_edge(b, a));
  }
}

TEST_CASE("connected components of aggregation maps") {
  const MeshGraph strip = mesh_graph(build_cartesian(box({0, 0}, {3, 1}), {3, 1}));
  auto aggs = connected_components(strip, AggregationMap{{{0, 1}, {1, 2}}});
  REQUIRE(aggs.size() == 1);
  CHECK(aggs[0].cells == std::vector<int>{0, 1, 2});
  CHECK(aggs[0].representative() == 0);

  const MeshGraph sq = mesh_graph(build_cartesian(box({0, 0}, {2, 2}), {2, 2}));
  aggs = connected_components(sq, AggregationMap{});
  CHECK(aggs.size() == 4);
  for (int j = 0; j < 4; ++j) CHECK(aggs[j].cells == std::vector<int>{j});

  aggs = connected_components(sq, AggregationMap{{{0, 1}, {2, 3}}});
  CHECK(as_sets(aggs) == std::set<std::vector<int>>{{0, 1}, {2, 3}});

  CHECK(error_kind([&] { connected_components(sq, AggregationMap{{{0, 3}}}); }) == ErrorKind::InvalidMap);
}

TEST_CASE("connected components do not depend on edge order") {
  const MeshGraph g = mesh_graph(build_cartesian(box({0, 0}, {4, 4}), {4, 4}));
  std::vector<Edge> edges = {{0, 1}, {5, 9}, {1, 5}, {10, 11}, {14, 15}, {11, 15}};
  const auto ref = as_sets(connected_components(g, AggregationMap{edges}));
  std::reverse(edges.begin(), edges.end());
  CHECK(as_sets(connected_components(g, AggregationMap{edges})) == ref);
  std::rotate(edges.begin(), edges.begin() + 2, edges.end());
  CHECK(as_sets(connected_components(g, AggregationMap{edges})) == ref);
  CHECK(ref == std::set<std::vector<int>>{{0, 1, 5, 9}, {10, 11, 14, 15}, {2}, {3}, {4}, {6}, {7}, {8}, {12}, {13}});
}

TEST_CASE("multigrid aggregation sequence on 8x8") {
  const BackgroundMesh m = build_cartesian(box({0, 0}, {1, 1}), {8, 8});
  const MeshGraph g = mesh_graph(m);
  const auto seq = build_multigrid_aggregation_sequence(m, 3);
  REQUIRE(seq.size() == 3);
  CHECK(seq[0].edges.empty());
  const std::vector<std::size_t> counts = {64, 16, 4};
  for (int l = 0; l < 3; ++l) {
    const auto aggs = connected_components(g, seq[l]);
    CHECK(aggs.size() == counts[l]);
    for (const auto& a : aggs) CHECK(a.cells.size() == 64 / counts[l]);
  }
  // Nesting: every edge of a level is an edge of the next one.
  for (int l = 0; l + 1 < 3; ++l)
    for (const Edge& e : seq[l].edges)
      CHECK(std::find(seq[l + 1].edges.begin(), seq[l + 1].edges.end(), e) != seq[l + 1].edges.end());
}

TEST_CASE("single-level sequence and invalid level counts") {
  const BackgroundMesh m = build_cartesian(box({0, 0}, {1, 1}), {8, 8});
  const auto seq = build_multigrid_aggregation_sequence(m, 1);
  REQUIRE(seq.size() == 1);
  CHECK(seq[0].edges.empty());
  CHECK(error_kind([&] { build_multigrid_aggregation_sequence(m, 0); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("remainder cells join the last block") {
  // 9 cells per axis with width 2 gives blocks {0,1},{2,3},{4,5},{6,7,8}.
  const BackgroundMesh m = build_cartesian(box({0, 0}, {1, 1}), {9, 9});
  const auto seq = build_multigrid_aggregation_sequence(m, 2);
  const auto aggs = connected_components(mesh_graph(m), seq[1]);
  CHECK(aggs.size() == 16);
  std::vector<std::size_t> sizes;
  for (const auto& a : aggs) sizes.push_back(a.cells.size());
  CHECK(std::count(sizes.begin(), sizes.end(), 4u) == 9);
  CHECK(std::count(sizes.begin(), sizes.end(), 6u) == 6);
  CHECK(std::count(sizes.begin(), sizes.end(), 9u) == 1);
}
