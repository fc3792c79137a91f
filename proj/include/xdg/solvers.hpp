#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "xdg/block_sparse.hpp"
#include "xdg/direct.hpp"
#include "xdg/mesh.hpp"
#include "xdg/multigrid.hpp"
#include "xdg/xdg_space.hpp"

namespace xdg {

struct SolverConfig {
  double tol = 1e-10;
  int max_iter = 200;
  /// Low-order degree of the p-multigrid split.
  int k_lo = 1;
  int schwarz_block_dofs = 2000;
  int gmres_restart = 30;
  int levels = 3;
  int rm_max_columns = 200;
  /// Multigrid cycles run on each coarse level per visit.
  int coarse_cycles = 1;
  /// Take the p-multigrid high-order right-hand sides from b instead of the
  /// residual after the low-order solve.
  bool pmg_high_from_rhs = false;
  /// Feed the original right-hand side instead of the current residual to
  /// the smoother.
  bool smoother_from_rhs = false;
  /// Local p-multigrid cell solves cover all modes instead of the high-order
  /// ones only.
  bool pmg_cell_all_modes = true;

  void validate(int degree) const;
};

struct SolverReport {
  std::string solver;
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;
  std::vector<double> history;
  double setup_basis_ms = 0.0;
  double setup_matmat_ms = 0.0;
  double solve_ms = 0.0;
};

std::string solver_report_csv_header();
std::string solver_report_csv_row(const SolverReport& r);
std::string residual_history_csv(const SolverReport& r);

struct PmgVariant {
  /// Cell solves take their right-hand side from b instead of the residual
  /// after the low-order solve.
  bool high_from_rhs = false;
  /// Cell solves cover all modes of the cell, not only the high-order ones.
  bool cell_all_modes = true;
};

/// Block-Jacobi p-multigrid on the sub-system of M formed by `cells`
/// (groups of block indices, in order). One global direct solve on the
/// first `low_modes` modes of every block, then one dense solve per cell.
/// Factorizations are computed once and reused.
class PmgSolver {
 public:
  PmgSolver(const BlockSparseMatrix<double>& M, std::vector<std::vector<int>> cells, int low_modes,
            PmgVariant variant = {});

  /// Block indices in the local ordering of apply().
  const std::vector<int>& blocks() const { return blocks_; }
  Eigen::Index size() const { return A_.rows(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& b) const;

 private:
  Eigen::SparseMatrix<double> A_;
  std::vector<int> blocks_;
  std::vector<int> low_;
  DirectSolver low_solver_;
  std::vector<std::vector<int>> high_;
  std::vector<DirectSolver> high_solvers_;
  PmgVariant variant_;
};

Eigen::VectorXd pmg_apply(const PmgSolver& pmg, const Eigen::VectorXd& b);

/// Groups of the blocks of M: one group per background cell, holding the
/// blocks whose aggregate representative is that cell (or, for the cut-cell
/// space, its species entries).
std::vector<std::vector<int>> cell_groups(const AggregatedSpace& space);
std::vector<std::vector<int>> cell_groups(const XdgIndexMap& map);

/// Graph of the groups induced by the block sparsity of M.
MeshGraph group_graph(const BlockSparseMatrix<double>& M, const std::vector<std::vector<int>>& groups);

struct SchwarzPartition {
  /// Node sets before overlap.
  std::vector<std::vector<int>> blocks;
  /// Node sets after adding one neighbour layer.
  std::vector<std::vector<int>> extended;
  /// Number of extended blocks containing each node.
  std::vector<int> damping;
};

/// Greedy breadth-first graph growing from the lowest unassigned node until
/// a block reaches `target_dofs`; blocks below half the target are merged
/// into a neighbouring block. Each block is then extended by one layer.
SchwarzPartition schwarz_partition(const MeshGraph& graph, const std::vector<int>& node_dofs, int target_dofs);
SchwarzPartition schwarz_partition(const MeshGraph& graph, const XdgIndexMap& map, int target_dofs);

/// Additive Schwarz with p-multigrid block solves, scaled by the block
/// membership counts.
class SchwarzSmoother {
 public:
  SchwarzSmoother(const BlockSparseMatrix<double>& M, const std::vector<std::vector<int>>& groups,
                  const SchwarzPartition& partition, int low_modes, PmgVariant variant = {});

  Eigen::VectorXd apply(const Eigen::VectorXd& r) const;
  /// Sum of the block corrections before scaling.
  Eigen::VectorXd apply_unscaled(const Eigen::VectorXd& r) const;
  const Eigen::VectorXd& damping() const { return damping_; }
  int num_blocks() const { return static_cast<int>(solvers_.size()); }

 private:
  std::vector<int> offsets_;
  std::vector<int> sizes_;
  std::vector<PmgSolver> solvers_;
  Eigen::VectorXd damping_;
};

Eigen::VectorXd schwarz_apply(const SchwarzSmoother& smoother, const Eigen::VectorXd& r);

enum class RmResult { Accepted, Dependent };

/// Residual minimization state: orthonormal W = M Z, x = x0 + Z a,
/// r = r0 - W a.
class RmState {
 public:
  RmState(Eigen::VectorXd x0, Eigen::VectorXd r0, int max_columns = 200);

  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& r() const { return r_; }
  const Eigen::VectorXd& x0() const { return x0_; }
  const Eigen::VectorXd& r0() const { return r0_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  int columns() const { return static_cast<int>(W_.size()); }
  Eigen::MatrixXd W() const;
  Eigen::MatrixXd Z() const;
  /// Clears W and Z and restarts from the current iterate.
  void restart(const Eigen::VectorXd& r);

 private:
  friend RmResult rm_step(RmState&, const Eigen::VectorXd&, const BlockSparseMatrix<double>&);
  Eigen::VectorXd x0_, r0_, x_, r_, alpha_;
  std::vector<Eigen::VectorXd> W_, Z_;
  int max_columns_;
};

/// Appends the candidate z (orthonormalized image under M) and updates x and
/// r. Candidates whose orthogonalized image is below 1e-13 of |M z| are
/// skipped and reported as Dependent, leaving the state unchanged.
RmResult rm_step(RmState& state, const Eigen::VectorXd& z, const BlockSparseMatrix<double>& M);

/// Orthonormalization multigrid over a hierarchy.
class OrthoMgSolver {
 public:
  OrthoMgSolver(const MultigridHierarchy& hierarchy, SolverConfig config);

  /// Solves M x = b on `level` from x0.
  SolverReport solve(const Eigen::VectorXd& b, Eigen::VectorXd& x, int level = 0) const;
  /// Optional hook called after every rm_step on the finest level.
  std::function<void(const RmState&, const BlockSparseMatrix<double>&)> on_rm_step;

 private:
  Eigen::VectorXd cycle(int level, const Eigen::VectorXd& b, int cycles) const;
  void iterate(int level, const Eigen::VectorXd& b, RmState& st, int max_iter, double tol,
               SolverReport* report) const;

  const MultigridHierarchy& h_;
  SolverConfig cfg_;
  std::vector<std::unique_ptr<SchwarzSmoother>> smoothers_;
  std::vector<BlockSparseMatrix<double>> Rt_;
  DirectSolver coarse_;
};

std::pair<Eigen::VectorXd, SolverReport> ortho_mg_solve(const MultigridHierarchy& hierarchy, const Eigen::VectorXd& b,
                                                        const Eigen::VectorXd& x0, const SolverConfig& config,
                                                        int level = 0);

/// Right-preconditioned restarted GMRES (modified Gram-Schmidt) with a
/// p-multigrid preconditioner over all cells.
std::pair<Eigen::VectorXd, SolverReport> gmres_pmg_solve(const BlockSparseMatrix<double>& M, const Eigen::VectorXd& b,
                                                         const SolverConfig& config, const PmgSolver& preconditioner);

std::pair<Eigen::VectorXd, SolverReport> direct_solve(const BlockSparseMatrix<double>& M, const Eigen::VectorXd& b);

}  // namespace xdg
