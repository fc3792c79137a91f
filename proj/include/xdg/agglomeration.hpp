#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "xdg/basis.hpp"
#include "xdg/block_sparse.hpp"
#include "xdg/cutcell.hpp"
#include "xdg/error.hpp"
#include "xdg/mesh.hpp"
#include "xdg/xdg_space.hpp"

namespace xdg {

/// Edges between cut cells of the same species, stored per species as pairs
/// of background-cell indices (first < second).
struct CutAggregationMap {
  std::array<std::vector<Edge>, 2> edges;

  const std::vector<Edge>& operator[](Species s) const { return edges[index(s)]; }
  std::size_t size() const { return edges[0].size() + edges[1].size(); }
};

/// Connected single-species set of cut cells, sorted; the representative is
/// the lowest background index.
struct CutAggregate {
  Species species = Species::A;
  std::vector<int> cells;
  int representative() const { return cells.front(); }
};

/// Cut cells with 0 < volume fraction <= alpha point to their largest
/// same-species face neighbour (ties: lower index). Aggregates that stay at
/// or below alpha are linked on to their largest neighbour until every
/// aggregate exceeds alpha or has no neighbour left.
CutAggregationMap small_cell_agglomeration_map(const CutCellMesh& cutmesh, double alpha);

/// Duplicates each background edge for every species present in both cells.
CutAggregationMap lift_aggregation_to_cutcells(const AggregationMap& map, const CutCellMesh& cutmesh);

CutAggregationMap merge_maps(const CutAggregationMap& a, const CutAggregationMap& b);

/// Aggregates sorted by (representative, species).
std::vector<CutAggregate> cut_aggregates(const CutCellMesh& cutmesh, const CutAggregationMap& map);

/// Orthonormal degree-k XDG space on species aggregates. Each aggregate
/// carries bounding-box Legendre polynomials orthonormalized against its
/// species mass matrix (Cholesky, S = L^{-T}).
class AggregatedSpace {
 public:
  AggregatedSpace(const CutCellMesh& cutmesh, const ReferenceBasis& basis, const SpeciesMass& mass,
                  std::vector<CutAggregate> aggregates, ErrorKind failure = ErrorKind::DegenerateAggregate);

  int num_aggregates() const { return static_cast<int>(aggs_.size()); }
  int entry_size() const { return N_; }
  int size() const { return num_aggregates() * N_; }
  std::vector<int> block_sizes() const { return std::vector<int>(aggs_.size(), N_); }

  const CutAggregate& aggregate(int a) const { return aggs_[a]; }
  const std::vector<CutAggregate>& aggregates() const { return aggs_; }
  /// Aggregate holding species s of cell j, or -1.
  int aggregate_of(int j, Species s) const { return owner_[j][index(s)]; }
  const Box& bbox(int a) const { return data_[a].bbox; }
  const Eigen::MatrixXd& S(int a) const { return data_[a].S; }
  double volume(int a) const { return data_[a].volume; }
  /// Coefficients of the aggregate basis in the cell basis of its i-th cell.
  const Eigen::MatrixXd& coefficients(int a, int i) const { return data_[a].coeff[i]; }
  /// True when the aggregate is a single uncut cell (basis = cell basis).
  bool trivial(int a) const { return data_[a].trivial; }

  /// Mean number of cells per aggregate.
  double mean_aggregate_size() const;

 private:
  struct Data {
    Box bbox;
    Eigen::MatrixXd S;
    std::vector<Eigen::MatrixXd> coeff;
    double volume = 0.0;
    bool trivial = false;
  };
  int N_;
  std::vector<CutAggregate> aggs_;
  std::vector<Data> data_;
  std::vector<std::array<int, 2>> owner_;
};

/// Prolongation from `coarse` to `fine` (L_fine x L_coarse), blocks
/// sum_j C_fine_j^T M_j C_coarse_j. Requires every fine aggregate to lie in
/// one coarse aggregate (InvalidMap otherwise).
BlockSparseMatrix<double> build_restriction(const AggregatedSpace& fine, const AggregatedSpace& coarse,
                                            const SpeciesMass& mass);

/// Prolongation from an aggregated space to the cut-cell space of `map`
/// (the non-orthonormalized cell basis on every (cell, species) pair).
BlockSparseMatrix<double> build_cell_prolongation(const XdgIndexMap& map, const AggregatedSpace& space);

}  // namespace xdg
