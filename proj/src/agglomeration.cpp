#include "xdg/agglomeration.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <string>

#include "xdg/quadrature.hpp"

namespace xdg {

namespace {

Edge make_edge(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

CutAggregationMap small_cell_agglomeration_map(const CutCellMesh& cutmesh, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidConfig, "alpha must lie in [0, 1)");
  const MeshGraph graph = mesh_graph(cutmesh.mesh());
  const double cell_volume = cutmesh.mesh().cell_volume();
  CutAggregationMap out;
  for (Species s : kSpecies) {
    std::set<Edge> edges;
    for (int j = 0; j < cutmesh.num_cells(); ++j) {
      if (!cutmesh.present(j, s) || cutmesh.fraction(j, s) > alpha) continue;
      int target = -1;
      for (int l : graph.neighbors[j]) {
        if (!cutmesh.present(l, s)) continue;
        if (target < 0 || cutmesh.volume(l, s) > cutmesh.volume(target, s)) target = l;
      }
      if (target < 0) {
        std::ostringstream msg;
        msg << "cell " << j << " (species " << name(s) << ", volume fraction " << cutmesh.fraction(j, s)
            << ") has no neighbour of the same species";
        throw Error(ErrorKind::IsolatedSmallCell, msg.str());
      }
      edges.insert(make_edge(j, target));
    }

    // aggregates made only of small cells are linked on to a larger neighbour
    for (bool changed = true; changed;) {
      changed = false;
      const auto comps = components(cutmesh.num_cells(), {edges.begin(), edges.end()});
      for (const auto& c : comps) {
        if (!cutmesh.present(c.representative(), s)) continue;
        double vol = 0.0;
        for (int j : c.cells) vol += cutmesh.volume(j, s);
        if (vol > alpha * cell_volume) continue;
        int from = -1, target = -1;
        for (int j : c.cells) {
          for (int l : graph.neighbors[j]) {
            if (!cutmesh.present(l, s) || std::binary_search(c.cells.begin(), c.cells.end(), l)) continue;
            if (target < 0 || cutmesh.volume(l, s) > cutmesh.volume(target, s) ||
                (cutmesh.volume(l, s) == cutmesh.volume(target, s) && l < target)) {
              target = l;
              from = j;
            }
          }
        }
        if (target >= 0) {
          edges.insert(make_edge(from, target));
          changed = true;
          break;
        }
      }
    }
    out.edges[index(s)].assign(edges.begin(), edges.end());
  }
  return out;
}

CutAggregationMap lift_aggregation_to_cutcells(const AggregationMap& map, const CutCellMesh& cutmesh) {
  CutAggregationMap out;
  for (Species s : kSpecies)
    for (const auto& [a, b] : map.edges)
      if (cutmesh.present(a, s) && cutmesh.present(b, s)) out.edges[index(s)].push_back(make_edge(a, b));
  return out;
}

CutAggregationMap merge_maps(const CutAggregationMap& a, const CutAggregationMap& b) {
  CutAggregationMap out;
  for (int s = 0; s < 2; ++s) {
    std::set<Edge> e(a.edges[s].begin(), a.edges[s].end());
    e.insert(b.edges[s].begin(), b.edges[s].end());
    out.edges[s].assign(e.begin(), e.end());
  }
  return out;
}

std::vector<CutAggregate> cut_aggregates(const CutCellMesh& cutmesh, const CutAggregationMap& map) {
  std::vector<CutAggregate> out;
  for (Species s : kSpecies) {
    for (const auto& [a, b] : map[s])
      if (!cutmesh.present(a, s) || !cutmesh.present(b, s))
        throw Error(ErrorKind::InvalidMap, std::string("aggregation edge joins a cell without species ") + name(s));
    for (auto& c : components(cutmesh.num_cells(), map[s]))
      if (cutmesh.present(c.representative(), s)) out.push_back(CutAggregate{s, std::move(c.cells)});
  }
  std::sort(out.begin(), out.end(), [](const CutAggregate& x, const CutAggregate& y) {
    return x.representative() != y.representative() ? x.representative() < y.representative()
                                                     : index(x.species) < index(y.species);
  });
  return out;
}

AggregatedSpace::AggregatedSpace(const CutCellMesh& cutmesh, const ReferenceBasis& basis, const SpeciesMass& mass,
                                 std::vector<CutAggregate> aggregates, ErrorKind failure)
    : N_(basis.size()), aggs_(std::move(aggregates)) {
  const BackgroundMesh& mesh = cutmesh.mesh();
  owner_.assign(cutmesh.num_cells(), {-1, -1});
  data_.resize(aggs_.size());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N_, N_);
  Eigen::MatrixXd cell_vals, box_vals;
  for (int a = 0; a < num_aggregates(); ++a) {
    const CutAggregate& agg = aggs_[a];
    const Species s = agg.species;
    Data& d = data_[a];
    for (int j : agg.cells) {
      if (owner_[j][index(s)] >= 0)
        throw Error(ErrorKind::InvalidMap, "cell " + std::to_string(j) + " belongs to two aggregates");
      owner_[j][index(s)] = a;
      d.volume += cutmesh.volume(j, s);
    }
    d.bbox = mesh.cell_box(agg.cells.front());
    for (int j : agg.cells) d.bbox = d.bbox.merged(mesh.cell_box(j));

    std::ostringstream what;
    what << "aggregate of cell " << agg.representative() << ", species " << name(s) << ", volume fraction "
         << d.volume / mesh.cell_volume();
    if (agg.cells.size() == 1) {
      const int j = agg.cells.front();
      d.trivial = mass.identity(j, s);
      d.S = d.trivial ? I : orthonormalizing_factor(mass(j, s), failure, what.str());
      d.coeff = {d.S};
      continue;
    }
    // T_j: bounding-box polynomials in the basis of cell j (exact L2 projection)
    std::vector<Eigen::MatrixXd> T;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N_, N_);
    for (int j : agg.cells) {
      const Box cell = mesh.cell_box(j);
      const QuadRule q = tensor_rule(cell, 2 * basis.degree());
      basis.eval(cell, q.points, cell_vals);
      basis.eval(d.bbox, q.points, box_vals);
      T.push_back(cell_vals.transpose() * q.weights.asDiagonal() * box_vals);
      M.noalias() += T.back().transpose() * mass(j, s) * T.back();
    }
    d.S = orthonormalizing_factor(M, failure, what.str());
    for (const auto& t : T) d.coeff.push_back(t * d.S);
  }
}

double AggregatedSpace::mean_aggregate_size() const {
  double n = 0.0;
  for (const auto& a : aggs_) n += static_cast<double>(a.cells.size());
  return aggs_.empty() ? 0.0 : n / static_cast<double>(aggs_.size());
}

BlockSparseMatrix<double> build_restriction(const AggregatedSpace& fine, const AggregatedSpace& coarse,
                                            const SpeciesMass& mass) {
  BlockSparseMatrix<double> R(fine.block_sizes(), coarse.block_sizes());
  const int N = fine.entry_size();
  for (int b = 0; b < fine.num_aggregates(); ++b) {
    const CutAggregate& fb = fine.aggregate(b);
    const Species s = fb.species;
    const int a = coarse.aggregate_of(fb.representative(), s);
    for (int j : fb.cells)
      if (coarse.aggregate_of(j, s) != a || a < 0)
        throw Error(ErrorKind::InvalidMap, "coarse aggregation does not contain the fine aggregate of cell " +
                                               std::to_string(fb.representative()));
    const CutAggregate& ca = coarse.aggregate(a);
    if (ca.cells == fb.cells) {
      R.add_block(b, a, Eigen::MatrixXd::Identity(N, N));
      continue;
    }
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(N, N);
    for (std::size_t i = 0; i < fb.cells.size(); ++i) {
      const int j = fb.cells[i];
      const auto pos = std::lower_bound(ca.cells.begin(), ca.cells.end(), j) - ca.cells.begin();
      const Eigen::MatrixXd& cc = coarse.coefficients(a, static_cast<int>(pos));
      if (mass.identity(j, s))
        block.noalias() += fine.coefficients(b, static_cast<int>(i)).transpose() * cc;
      else
        block.noalias() += fine.coefficients(b, static_cast<int>(i)).transpose() * mass(j, s) * cc;
    }
    R.add_block(b, a, block);
  }
  return R;
}

BlockSparseMatrix<double> build_cell_prolongation(const XdgIndexMap& map, const AggregatedSpace& space) {
  if (map.entry_size() != space.entry_size())
    throw Error(ErrorKind::DimensionMismatch, "index map and aggregated space use different bases");
  BlockSparseMatrix<double> P(std::vector<int>(map.num_entries(), map.entry_size()), space.block_sizes());
  for (int a = 0; a < space.num_aggregates(); ++a) {
    const CutAggregate& agg = space.aggregate(a);
    for (std::size_t i = 0; i < agg.cells.size(); ++i) {
      const int e = map.entry_of(agg.cells[i], agg.species);
      if (e < 0) throw Error(ErrorKind::DimensionMismatch, "aggregate covers a cell without that species");
      P.add_block(e, a, space.coefficients(a, static_cast<int>(i)));
    }
  }
  return P;
}

}  // namespace xdg
