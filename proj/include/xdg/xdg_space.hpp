#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "xdg/basis.hpp"
#include "xdg/cutcell.hpp"
#include "xdg/error.hpp"

namespace xdg {

/// One (cell, species) pair carrying degrees of freedom.
struct DofEntry {
  int cell = 0;
  Species species = Species::A;
};

struct MultiIndex {
  int cell = 0;
  int variable = 0;
  Species species = Species::A;
  int mode = 0;
  bool operator==(const MultiIndex&) const = default;
};

/// Flat numbering m(j, variable, species, mode) of the XDG unknowns:
/// cells ascending, species A before B, variables ascending, modes ascending.
class XdgIndexMap {
 public:
  XdgIndexMap(const CutCellMesh& cutmesh, std::vector<int> degrees);

  int size() const { return size_; }
  int dim() const { return dim_; }
  int num_cells() const { return static_cast<int>(cell_entries_.size()); }
  int num_variables() const { return static_cast<int>(degrees_.size()); }
  int degree(int variable) const { return degrees_[variable]; }
  int modes(int variable) const { return var_size_[variable]; }
  int entry_size() const { return entry_size_; }

  int num_entries() const { return static_cast<int>(entries_.size()); }
  const DofEntry& entry(int e) const { return entries_[e]; }
  int entry_offset(int e) const { return e * entry_size_; }
  /// Entry index of (j, s), or -1 when s is absent in cell j.
  int entry_of(int j, Species s) const { return cell_entries_[j][xdg::index(s)]; }
  std::vector<int> entries_of_cell(int j) const;

  /// Throws InvalidInput for tuples that do not exist.
  int index(int cell, int variable, Species s, int mode) const;
  MultiIndex inverse(int flat) const;

  /// m(cells, -, -, < n_modes): the first n_modes modes of every variable.
  std::vector<int> indices_up_to(const std::vector<int>& cells, int n_modes) const;
  /// m(j, -, -, >= n_modes).
  std::vector<int> indices_above(int j, int n_modes) const;

 private:
  int dim_;
  std::vector<int> degrees_;
  std::vector<int> var_size_;
  std::vector<int> var_offset_;
  int entry_size_ = 0;
  int size_ = 0;
  std::vector<DofEntry> entries_;
  std::vector<std::array<int, 2>> cell_entries_;
};

XdgIndexMap build_index_map(const CutCellMesh& cutmesh, const std::vector<int>& degrees);

/// S = L^{-T} for the Cholesky factor L of a symmetric positive definite
/// mass matrix, so that S^T M S = I. S is upper triangular. Throws `kind`
/// when a pivot falls below 1e-13 times the largest diagonal entry.
Eigen::MatrixXd orthonormalizing_factor(const Eigen::MatrixXd& mass, ErrorKind kind, const std::string& what);

/// Species-restricted mass matrices of the cell basis, one per (cell,
/// species); uncut cells hold the identity exactly.
class SpeciesMass {
 public:
  SpeciesMass(const CutCellMesh& cutmesh, const ReferenceBasis& basis);
  const Eigen::MatrixXd& operator()(int j, Species s) const { return mass_[j][index(s)]; }
  bool identity(int j, Species s) const { return identity_[j][index(s)]; }

 private:
  std::vector<std::array<Eigen::MatrixXd, 2>> mass_;
  std::vector<std::array<bool, 2>> identity_;
};

/// Per-cell, per-species re-orthonormalization factors S.
class SpeciesOrthoBlocks {
 public:
  SpeciesOrthoBlocks() = default;
  const Eigen::MatrixXd& S(int j, Species s) const;
  bool identity(int j, Species s) const { return identity_[j][index(s)]; }
  bool has(int j, Species s) const { return blocks_[j][index(s)].size() > 0; }

 private:
  friend SpeciesOrthoBlocks build_species_orthonormalization(const CutCellMesh&, const ReferenceBasis&);
  std::vector<std::array<Eigen::MatrixXd, 2>> blocks_;
  std::vector<std::array<bool, 2>> identity_;
};

/// Throws InsufficientAgglomeration when a species mass matrix is not
/// numerically positive definite.
SpeciesOrthoBlocks build_species_orthonormalization(const CutCellMesh& cutmesh, const ReferenceBasis& basis);

}  // namespace xdg
