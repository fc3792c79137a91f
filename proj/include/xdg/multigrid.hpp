#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "xdg/agglomeration.hpp"
#include "xdg/block_sparse.hpp"
#include "xdg/mesh.hpp"
#include "xdg/xdg_space.hpp"

namespace xdg {

struct MultigridLevel {
  std::shared_ptr<const AggregatedSpace> space;
  BlockSparseMatrix<double> M;
  Eigen::VectorXd b;
  /// Prolongation to this level from the next coarser one (L_this x
  /// L_coarser); empty on the coarsest level.
  BlockSparseMatrix<double> R;

  int size() const { return space->size(); }
};

/// Levels of agglomerated XDG spaces. Level 0 uses the small-cell
/// agglomeration map alone; level l > 0 adds the background aggregation
/// of index blocks of width 2^l lifted to the cut cells.
struct MultigridHierarchy {
  std::vector<MultigridLevel> levels;
  /// Prolongation from level 0 to the cut-cell space of the assembly.
  BlockSparseMatrix<double> P;
  double basis_ms = 0.0;
  double matmat_ms = 0.0;

  int num_levels() const { return static_cast<int>(levels.size()); }
  const MultigridLevel& finest() const { return levels.front(); }
};

/// (R^T M R, R^T b).
std::pair<BlockSparseMatrix<double>, Eigen::VectorXd> galerkin_restrict(const BlockSparseMatrix<double>& M,
                                                                         const Eigen::VectorXd& b,
                                                                         const BlockSparseMatrix<double>& R);

/// `M0`, `b0` live on the cut-cell space of `map`.
MultigridHierarchy build_hierarchy(const CutCellMesh& cutmesh, const ReferenceBasis& basis, const SpeciesMass& mass,
                                   const XdgIndexMap& map, const BlockSparseMatrix<double>& M0,
                                   const Eigen::VectorXd& b0, const CutAggregationMap& small_cells, int num_levels);

/// One CSV row per level: level,aggregates,dofs,blocks,mean_aggregate_size.
std::string hierarchy_summary_csv(const MultigridHierarchy& h);

}  // namespace xdg
