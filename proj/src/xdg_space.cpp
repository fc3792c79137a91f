#include "xdg/xdg_space.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>

namespace xdg {

XdgIndexMap::XdgIndexMap(const CutCellMesh& cutmesh, std::vector<int> degrees)
    : dim_(cutmesh.dim()), degrees_(std::move(degrees)) {
  if (cutmesh.num_cells() == 0) throw Error(ErrorKind::InvalidInput, "empty mesh");
  if (degrees_.empty()) throw Error(ErrorKind::InvalidInput, "degree vector is empty");
  for (int k : degrees_) {
    if (k < 0) throw Error(ErrorKind::InvalidInput, "polynomial degrees must be >= 0");
    var_offset_.push_back(entry_size_);
    var_size_.push_back(basis_dimension(k, dim_));
    entry_size_ += var_size_.back();
  }
  cell_entries_.assign(cutmesh.num_cells(), {-1, -1});
  for (int j = 0; j < cutmesh.num_cells(); ++j) {
    for (Species s : kSpecies) {
      if (!cutmesh.present(j, s)) continue;
      cell_entries_[j][xdg::index(s)] = static_cast<int>(entries_.size());
      entries_.push_back(DofEntry{j, s});
    }
  }
  if (entries_.empty()) throw Error(ErrorKind::InvalidInput, "no species present in any cell");
  size_ = static_cast<int>(entries_.size()) * entry_size_;
}

std::vector<int> XdgIndexMap::entries_of_cell(int j) const {
  std::vector<int> out;
  for (int e : cell_entries_[j])
    if (e >= 0) out.push_back(e);
  return out;
}

int XdgIndexMap::index(int cell, int variable, Species s, int mode) const {
  if (cell < 0 || cell >= num_cells() || variable < 0 || variable >= num_variables() || mode < 0 ||
      mode >= var_size_[variable])
    throw Error(ErrorKind::InvalidInput, "multi-index out of range");
  const int e = entry_of(cell, s);
  if (e < 0)
    throw Error(ErrorKind::InvalidInput,
                std::string("species ") + name(s) + " is absent in cell " + std::to_string(cell));
  return e * entry_size_ + var_offset_[variable] + mode;
}

MultiIndex XdgIndexMap::inverse(int flat) const {
  if (flat < 0 || flat >= size_) throw Error(ErrorKind::InvalidInput, "flat index out of range");
  const int e = flat / entry_size_;
  int local = flat % entry_size_;
  int v = 0;
  while (local >= var_size_[v]) local -= var_size_[v++];
  return MultiIndex{entries_[e].cell, v, entries_[e].species, local};
}

std::vector<int> XdgIndexMap::indices_up_to(const std::vector<int>& cells, int n_modes) const {
  std::vector<int> out;
  for (int j : cells)
    for (int e : entries_of_cell(j))
      for (int v = 0; v < num_variables(); ++v)
        for (int n = 0; n < std::min(n_modes, var_size_[v]); ++n)
          out.push_back(e * entry_size_ + var_offset_[v] + n);
  return out;
}

std::vector<int> XdgIndexMap::indices_above(int j, int n_modes) const {
  std::vector<int> out;
  for (int e : entries_of_cell(j))
    for (int v = 0; v < num_variables(); ++v)
      for (int n = std::max(n_modes, 0); n < var_size_[v]; ++n)
        out.push_back(e * entry_size_ + var_offset_[v] + n);
  return out;
}

XdgIndexMap build_index_map(const CutCellMesh& cutmesh, const std::vector<int>& degrees) {
  return XdgIndexMap(cutmesh, degrees);
}

Eigen::MatrixXd orthonormalizing_factor(const Eigen::MatrixXd& mass, ErrorKind kind, const std::string& what) {
  const Eigen::Index n = mass.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(mass);
  const double max_diag = mass.diagonal().maxCoeff();
  bool ok = llt.info() == Eigen::Success && max_diag > 0.0;
  if (ok) {
    const Eigen::MatrixXd L = llt.matrixL();
    for (Eigen::Index i = 0; i < n; ++i) ok &= L(i, i) * L(i, i) >= 1e-13 * max_diag;
  }
  if (!ok) throw Error(kind, "mass matrix is not numerically positive definite (" + what + ")");
  // S = L^{-T}: solve L^T S = I
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n);
  llt.matrixU().solveInPlace(S);
  return S;
}

SpeciesMass::SpeciesMass(const CutCellMesh& cutmesh, const ReferenceBasis& basis) {
  const int n = cutmesh.num_cells();
  mass_.resize(n);
  identity_.assign(n, {false, false});
  const int N = basis.size();
  Eigen::MatrixXd B;
  for (int j = 0; j < n; ++j) {
    for (Species s : kSpecies) {
      if (!cutmesh.present(j, s)) continue;
      if (!cutmesh.is_cut(j)) {
        mass_[j][index(s)] = Eigen::MatrixXd::Identity(N, N);
        identity_[j][index(s)] = true;
        continue;
      }
      const QuadRule& q = cutmesh.quad_volume(j, s);
      basis.eval(cutmesh.mesh().cell_box(j), q.points, B);
      mass_[j][index(s)] = B.transpose() * q.weights.asDiagonal() * B;
    }
  }
}

const Eigen::MatrixXd& SpeciesOrthoBlocks::S(int j, Species s) const {
  if (!has(j, s))
    throw Error(ErrorKind::MissingSpecies,
                std::string("species ") + name(s) + " is absent in cell " + std::to_string(j));
  return blocks_[j][index(s)];
}

SpeciesOrthoBlocks build_species_orthonormalization(const CutCellMesh& cutmesh, const ReferenceBasis& basis) {
  const SpeciesMass mass(cutmesh, basis);
  SpeciesOrthoBlocks out;
  const int n = cutmesh.num_cells();
  out.blocks_.resize(n);
  out.identity_.assign(n, {false, false});
  for (int j = 0; j < n; ++j) {
    for (Species s : kSpecies) {
      if (!cutmesh.present(j, s)) continue;
      if (mass.identity(j, s)) {
        out.blocks_[j][index(s)] = Eigen::MatrixXd::Identity(basis.size(), basis.size());
        out.identity_[j][index(s)] = true;
        continue;
      }
      std::ostringstream what;
      what << "cell " << j << ", species " << name(s) << ", volume fraction " << cutmesh.fraction(j, s);
      out.blocks_[j][index(s)] =
          orthonormalizing_factor(mass(j, s), ErrorKind::InsufficientAgglomeration, what.str());
    }
  }
  return out;
}

}  // namespace xdg
