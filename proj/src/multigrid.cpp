#include "xdg/multigrid.hpp"

#include <chrono>
#include <sstream>
#include <tuple>

namespace xdg {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::pair<BlockSparseMatrix<double>, Eigen::VectorXd> galerkin_restrict(const BlockSparseMatrix<double>& M,
                                                                         const Eigen::VectorXd& b,
                                                                         const BlockSparseMatrix<double>& R) {
  if (M.rows() != R.rows() || M.cols() != R.rows() || b.size() != R.rows())
    throw Error(ErrorKind::DimensionMismatch, "Galerkin restriction: operand sizes differ");
  const BlockSparseMatrix<double> Rt = bs_transpose(R);
  return {bs_matmat(Rt, bs_matmat(M, R)), bs_matvec(Rt, b)};
}

MultigridHierarchy build_hierarchy(const CutCellMesh& cutmesh, const ReferenceBasis& basis, const SpeciesMass& mass,
                                   const XdgIndexMap& map, const BlockSparseMatrix<double>& M0,
                                   const Eigen::VectorXd& b0, const CutAggregationMap& small_cells, int num_levels) {
  const auto sequence = build_multigrid_aggregation_sequence(cutmesh.mesh(), num_levels);
  MultigridHierarchy h;
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::shared_ptr<const AggregatedSpace>> spaces;
  for (int l = 0; l < num_levels; ++l) {
    const CutAggregationMap m = merge_maps(lift_aggregation_to_cutcells(sequence[l], cutmesh), small_cells);
    spaces.push_back(std::make_shared<const AggregatedSpace>(
        cutmesh, basis, mass, cut_aggregates(cutmesh, m),
        l == 0 ? ErrorKind::InsufficientAgglomeration : ErrorKind::DegenerateAggregate));
  }
  h.P = build_cell_prolongation(map, *spaces[0]);
  h.levels.resize(num_levels);
  for (int l = 0; l < num_levels; ++l) {
    h.levels[l].space = spaces[l];
    if (l + 1 < num_levels) h.levels[l].R = build_restriction(*spaces[l], *spaces[l + 1], mass);
  }
  h.basis_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  std::tie(h.levels[0].M, h.levels[0].b) = galerkin_restrict(M0, b0, h.P);
  for (int l = 0; l + 1 < num_levels; ++l)
    std::tie(h.levels[l + 1].M, h.levels[l + 1].b) = galerkin_restrict(h.levels[l].M, h.levels[l].b, h.levels[l].R);
  h.matmat_ms = ms_since(t0);
  return h;
}

std::string hierarchy_summary_csv(const MultigridHierarchy& h) {
  std::ostringstream out;
  out << "level,aggregates,dofs,blocks,mean_aggregate_size\n";
  for (int l = 0; l < h.num_levels(); ++l) {
    const auto& lv = h.levels[l];
    out << l + 1 << ',' << lv.space->num_aggregates() << ',' << lv.size() << ',' << lv.M.num_blocks() << ','
        << lv.space->mean_aggregate_size() << '\n';
  }
  return out.str();
}

}  // namespace xdg
