#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "xdg/agglomeration.hpp"
#include "xdg/basis.hpp"
#include "xdg/block_sparse.hpp"
#include "xdg/cutcell.hpp"
#include "xdg/xdg_space.hpp"

namespace xdg {

enum class BoundaryType { Dirichlet, Neumann };

/// Field that may differ between the species (smooth extension per species).
using SpeciesField = std::function<double(const Eigen::VectorXd&, Species)>;

/// -div(mu grad u) = f in each species, [u] = 0 and [mu grad u . n] = 0 on
/// the interface, Dirichlet or Neumann data on the domain boundary.
struct PoissonProblem {
  double mu_a = 1.0;
  double mu_b = 1.0;
  SpeciesField source = [](const Eigen::VectorXd&, Species) { return 1.0; };
  SpeciesField dirichlet = [](const Eigen::VectorXd&, Species) { return 0.0; };
  SpeciesField neumann = [](const Eigen::VectorXd&, Species) { return 0.0; };
  /// Per domain face, index 2 * axis + side (side 0: low, 1: high).
  std::array<BoundaryType, 6> boundary{BoundaryType::Dirichlet, BoundaryType::Dirichlet, BoundaryType::Dirichlet,
                                       BoundaryType::Dirichlet, BoundaryType::Dirichlet, BoundaryType::Dirichlet};

  double mu(Species s) const { return s == Species::A ? mu_a : mu_b; }
  BoundaryType boundary_type(int axis, int side) const { return boundary[2 * axis + side]; }
  void validate() const;
};

struct PenaltyConfig {
  double c_eta = 4.0;
};

/// Volume-to-surface length scale h' = D |K_agg| / |dK_agg| of the
/// agglomerated cut cell holding each (cell, species) pair. The surface
/// includes the interface and excludes faces interior to the aggregate.
class PenaltyScales {
 public:
  PenaltyScales(const CutCellMesh& cutmesh, const std::vector<CutAggregate>& aggregates);
  /// Throws MissingSpecies when s is absent in cell j.
  double length(int j, Species s) const;

 private:
  std::vector<std::array<double, 2>> length_;
};

/// eta = c_eta k^2 max(1/h') over the adjacent pairs; `cell_b` < 0 for a
/// boundary face.
double penalty_eta(const PenaltyScales& scales, int cell_a, Species sa, int cell_b, Species sb, int degree,
                   const PenaltyConfig& config);

/// Symmetric interior penalty matrix in the cell basis of `map`; with
/// `ortho`, every (cell, species) block is transformed by its S factor.
BlockSparseMatrix<double> assemble_sip(const CutCellMesh& cutmesh, const XdgIndexMap& map,
                                       const ReferenceBasis& basis, const PoissonProblem& problem,
                                       const PenaltyScales& scales, const PenaltyConfig& penalty,
                                       const SpeciesOrthoBlocks* ortho = nullptr);

Eigen::VectorXd assemble_rhs(const CutCellMesh& cutmesh, const XdgIndexMap& map, const ReferenceBasis& basis,
                             const PoissonProblem& problem, const PenaltyScales& scales,
                             const PenaltyConfig& penalty, const SpeciesOrthoBlocks* ortho = nullptr);

/// sqrt(sum over cells and species of the integral of (u_h - u)^2).
double l2_error(const Eigen::VectorXd& u, const SpeciesField& exact, const CutCellMesh& cutmesh,
                const XdgIndexMap& map, const ReferenceBasis& basis, const SpeciesOrthoBlocks* ortho = nullptr);

/// Per-(cell, species) L2 projection of `field`.
Eigen::VectorXd l2_project(const SpeciesField& field, const CutCellMesh& cutmesh, const XdgIndexMap& map,
                           const ReferenceBasis& basis, const SpeciesOrthoBlocks* ortho = nullptr);

}  // namespace xdg
