#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "xdg/agglomeration.hpp"
#include "xdg/basis.hpp"
#include "xdg/block_sparse.hpp"
#include "xdg/cutcell.hpp"
#include "xdg/multigrid.hpp"
#include "xdg/sip.hpp"
#include "xdg/solvers.hpp"
#include "xdg/xdg_space.hpp"

namespace xdg {

/// One benchmark problem on (-1, 1)^dim. Unset optionals take the benchmark
/// defaults for the chosen degree.
struct BenchCase {
  int dim = 3;
  int cells = 4;
  int degree = 2;
  double mu_a = 1.0;
  double mu_b = 1000.0;
  std::optional<double> alpha;
  std::string levelset = "paper-benchmark";
  std::vector<double> levelset_params;
  /// "none", or "sphere" for u = (|x - c|^2 - R^2) / mu with the sphere
  /// level set (source -2 dim, Dirichlet data from u).
  std::string exact = "none";
  std::string solver = "omg";
  SolverConfig solver_config;
  std::optional<int> k_lo;
  int quad_depth = 3;
  std::optional<int> gauss_order;
  /// Moment-fit order of the cut-cell rules; < 0 disables the fit.
  std::optional<int> fit_order;
  double c_eta = 4.0;
  std::string out;

  /// Copy with every default filled in; throws InvalidConfig.
  BenchCase resolved() const;
};

/// Sets one configuration key (CLI flag name without dashes) from text.
void apply_setting(BenchCase& c, const std::string& key, const std::string& value);
/// Line-based key=value file; '#' starts a comment.
void load_config_file(BenchCase& c, const std::string& path);

/// Everything built for a case up to the multigrid hierarchy.
struct CaseSetup {
  BenchCase config;
  std::unique_ptr<CutCellMesh> cutmesh;
  std::unique_ptr<ReferenceBasis> basis;
  std::unique_ptr<XdgIndexMap> map;
  std::unique_ptr<SpeciesMass> mass;
  CutAggregationMap small_cells;
  PoissonProblem problem;
  /// Exact solution, empty when the case has none.
  SpeciesField exact;
  BlockSparseMatrix<double> M0;
  Eigen::VectorXd b0;
  MultigridHierarchy hierarchy;
  double cutcell_ms = 0.0;
  double assembly_ms = 0.0;
};

/// `levels` overrides the number of multigrid levels of the case.
CaseSetup setup_case(const BenchCase& c, std::optional<int> levels = std::nullopt);

struct CaseResult {
  SolverReport report;
  /// Cut-cell DOFs before agglomeration.
  int dofs = 0;
  int dofs_agglomerated = 0;
  /// NaN when the case has no exact solution.
  double l2_error = 0.0;
  /// Solution on the agglomerated finest level.
  Eigen::VectorXd solution;
};

CaseResult solve_setup(const CaseSetup& setup);
CaseResult run_case(const BenchCase& c);

std::string sweep_csv_header();
/// One row per (grid, degree, solver); failures leave the numeric columns
/// empty and fill the error column.
std::string run_sweep(const BenchCase& base, const std::vector<int>& grids, const std::vector<int>& degrees,
                      const std::vector<std::string>& solvers);

/// Median time per matvec over `repetitions` timed samples, and the time of
/// one M M^T product, on the agglomerated finest-level matrix. Each sample
/// averages a batch of matvecs sized to outlast the timer resolution.
std::string micro_bench_matops(const BenchCase& c, int repetitions = 20);

}  // namespace xdg
