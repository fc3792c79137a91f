#include "xdg/sip.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

namespace xdg {

void PoissonProblem::validate() const {
  if (!(mu_a > 0.0) || !(mu_b > 0.0)) throw Error(ErrorKind::InvalidConfig, "diffusion coefficients must be positive");
  if (!source || !dirichlet || !neumann) throw Error(ErrorKind::InvalidConfig, "problem data must be set");
}

PenaltyScales::PenaltyScales(const CutCellMesh& cutmesh, const std::vector<CutAggregate>& aggregates) {
  const BackgroundMesh& mesh = cutmesh.mesh();
  const int n = cutmesh.num_cells();
  std::vector<std::vector<int>> cell_faces(n);
  for (int f = 0; f < static_cast<int>(mesh.faces().size()); ++f) {
    const Face& face = mesh.faces()[f];
    cell_faces[face.in].push_back(f);
    if (!face.boundary()) cell_faces[face.out].push_back(f);
  }
  std::vector<std::array<int, 2>> owner(n, {-1, -1});
  for (int a = 0; a < static_cast<int>(aggregates.size()); ++a)
    for (int j : aggregates[a].cells) owner[j][index(aggregates[a].species)] = a;

  length_.assign(n, {0.0, 0.0});
  for (int a = 0; a < static_cast<int>(aggregates.size()); ++a) {
    const Species s = aggregates[a].species;
    double volume = 0.0, surface = 0.0;
    for (int j : aggregates[a].cells) {
      volume += cutmesh.volume(j, s);
      if (cutmesh.is_cut(j)) surface += cutmesh.interface_measure(j);
      for (int f : cell_faces[j]) {
        const Face& face = mesh.faces()[f];
        for (const FacePatch& p : cutmesh.face_patches(f)) {
          const bool mine = (face.in == j && p.in_species == s) || (face.out == j && p.out_species == s);
          if (!mine) continue;
          const bool interior = !face.boundary() && p.in_species == p.out_species &&
                                owner[face.in][index(s)] == a && owner[face.out][index(s)] == a;
          if (!interior) surface += p.rule.measure();
        }
      }
    }
    const double h = surface > 0.0 ? mesh.dim() * volume / surface : 0.0;
    for (int j : aggregates[a].cells) length_[j][index(s)] = h;
  }
}

double PenaltyScales::length(int j, Species s) const {
  const double h = length_[j][index(s)];
  if (!(h > 0.0))
    throw Error(ErrorKind::MissingSpecies,
                std::string("no agglomerated cell for species ") + name(s) + " in cell " + std::to_string(j));
  return h;
}

double penalty_eta(const PenaltyScales& scales, int cell_a, Species sa, int cell_b, Species sb, int degree,
                   const PenaltyConfig& config) {
  double inv = 1.0 / scales.length(cell_a, sa);
  if (cell_b >= 0) inv = std::max(inv, 1.0 / scales.length(cell_b, sb));
  return config.c_eta * degree * degree * inv;
}

namespace {

struct Side {
  int entry;
  int cell;
  Species species;
  double mu;
  double sign;  // jump sign: +1 on the in-side, -1 on the out-side
  Eigen::MatrixXd B;   // values (nq x N)
  Eigen::MatrixXd dn;  // normal derivatives (nq x N)
};

void check_layout(const CutCellMesh& cutmesh, const XdgIndexMap& map, const ReferenceBasis& basis) {
  if (map.num_cells() != cutmesh.num_cells() || map.entry_size() != basis.size() || map.dim() != cutmesh.dim())
    throw Error(ErrorKind::DimensionMismatch, "index map does not match the cut-cell mesh and basis");
  for (int e = 0; e < map.num_entries(); ++e)
    if (!cutmesh.present(map.entry(e).cell, map.entry(e).species))
      throw Error(ErrorKind::DimensionMismatch, "index map lists a species absent in the cut-cell mesh");
}

Eigen::MatrixXd normal_derivative(const std::vector<Eigen::MatrixXd>& grads, const Eigen::MatrixXd& normals) {
  Eigen::MatrixXd dn = Eigen::MatrixXd::Zero(grads[0].rows(), grads[0].cols());
  for (std::size_t d = 0; d < grads.size(); ++d) dn += normals.row(d).transpose().asDiagonal() * grads[d];
  return dn;
}

// Consistency, symmetry and penalty terms for a two-sided patch.
void add_two_sided(BlockSparseMatrix<double>& M, const Eigen::VectorXd& w, const std::array<const Side*, 2>& sides,
                   double eta_mu) {
  for (const Side* X : sides) {
    for (const Side* Y : sides) {
      const Eigen::MatrixXd wBX = w.asDiagonal() * X->B;
      Eigen::MatrixXd block = -0.5 * Y->mu * X->sign * (wBX.transpose() * Y->dn);
      block.noalias() -= 0.5 * X->mu * Y->sign * ((w.asDiagonal() * X->dn).transpose() * Y->B);
      block.noalias() += eta_mu * X->sign * Y->sign * (wBX.transpose() * Y->B);
      M.add_block(X->entry, Y->entry, block);
    }
  }
}

void transform(BlockSparseMatrix<double>& M, const XdgIndexMap& map, const SpeciesOrthoBlocks& ortho) {
  for (int i = 0; i < M.num_block_rows(); ++i) {
    const DofEntry& ei = map.entry(i);
    for (auto& [j, block] : M.row(i)) {
      const DofEntry& ej = map.entry(j);
      if (!ortho.identity(ei.cell, ei.species)) block = ortho.S(ei.cell, ei.species).transpose() * block;
      if (!ortho.identity(ej.cell, ej.species)) block = block * ortho.S(ej.cell, ej.species);
    }
  }
}

}  // namespace

BlockSparseMatrix<double> assemble_sip(const CutCellMesh& cutmesh, const XdgIndexMap& map,
                                       const ReferenceBasis& basis, const PoissonProblem& problem,
                                       const PenaltyScales& scales, const PenaltyConfig& penalty,
                                       const SpeciesOrthoBlocks* ortho) {
  check_layout(cutmesh, map, basis);
  problem.validate();
  const BackgroundMesh& mesh = cutmesh.mesh();
  const int D = mesh.dim();
  const int k = basis.degree();
  BlockSparseMatrix<double> M(std::vector<int>(map.num_entries(), map.entry_size()));
  Eigen::MatrixXd B;
  std::vector<Eigen::MatrixXd> G;

  for (int e = 0; e < map.num_entries(); ++e) {
    const auto [j, s] = map.entry(e);
    const QuadRule& q = cutmesh.quad_volume(j, s);
    basis.eval(mesh.cell_box(j), q.points, B, &G);
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (int d = 0; d < D; ++d) block.noalias() += G[d].transpose() * q.weights.asDiagonal() * G[d];
    M.add_block(e, e, problem.mu(s) * block);
  }

  for (int f = 0; f < static_cast<int>(mesh.faces().size()); ++f) {
    const Face& face = mesh.faces()[f];
    for (const FacePatch& p : cutmesh.face_patches(f)) {
      const QuadRule& q = p.rule;
      if (q.empty()) continue;
      Side in{map.entry_of(face.in, p.in_species), face.in, p.in_species, problem.mu(p.in_species), 1.0, {}, {}};
      basis.eval(mesh.cell_box(face.in), q.points, in.B, &G);
      if (face.boundary()) {
        if (problem.boundary_type(face.axis, face.side) == BoundaryType::Neumann) continue;
        in.dn = G[face.axis] * (face.side == 1 ? 1.0 : -1.0);
        const double eta = penalty_eta(scales, face.in, p.in_species, -1, p.in_species, k, penalty);
        const Eigen::MatrixXd wB = q.weights.asDiagonal() * in.B;
        Eigen::MatrixXd block = -in.mu * (wB.transpose() * in.dn);
        block -= in.mu * (in.dn.transpose() * wB);
        block.noalias() += eta * in.mu * (wB.transpose() * in.B);
        M.add_block(in.entry, in.entry, block);
        continue;
      }
      in.dn = G[face.axis];
      Side out{map.entry_of(face.out, p.out_species), face.out, p.out_species, problem.mu(p.out_species), -1.0, {}, {}};
      basis.eval(mesh.cell_box(face.out), q.points, out.B, &G);
      out.dn = G[face.axis];
      const double eta = penalty_eta(scales, face.in, p.in_species, face.out, p.out_species, k, penalty);
      add_two_sided(M, q.weights, {&in, &out}, eta * std::max(in.mu, out.mu));
    }
  }

  for (int j = 0; j < cutmesh.num_cells(); ++j) {
    if (!cutmesh.is_cut(j)) continue;
    const QuadRule& q = cutmesh.quad_interface(j);
    if (q.empty()) continue;
    Side a{map.entry_of(j, Species::A), j, Species::A, problem.mu_a, 1.0, {}, {}};
    basis.eval(mesh.cell_box(j), q.points, a.B, &G);
    a.dn = normal_derivative(G, q.normals);
    Side b = a;
    b.entry = map.entry_of(j, Species::B);
    b.species = Species::B;
    b.mu = problem.mu_b;
    b.sign = -1.0;
    const double eta = penalty_eta(scales, j, Species::A, j, Species::B, k, penalty);
    add_two_sided(M, q.weights, {&a, &b}, eta * std::max(problem.mu_a, problem.mu_b));
  }

  if (ortho) transform(M, map, *ortho);
  return M;
}

Eigen::VectorXd assemble_rhs(const CutCellMesh& cutmesh, const XdgIndexMap& map, const ReferenceBasis& basis,
                             const PoissonProblem& problem, const PenaltyScales& scales,
                             const PenaltyConfig& penalty, const SpeciesOrthoBlocks* ortho) {
  check_layout(cutmesh, map, basis);
  problem.validate();
  const BackgroundMesh& mesh = cutmesh.mesh();
  const int k = basis.degree();
  const int N = basis.size();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(map.size());
  Eigen::MatrixXd B;
  std::vector<Eigen::MatrixXd> G;

  auto values = [](const QuadRule& q, const SpeciesField& g, Species s) {
    Eigen::VectorXd v(q.size());
    for (Eigen::Index i = 0; i < q.size(); ++i) v[i] = g(q.points.col(i), s);
    return v;
  };

  for (int e = 0; e < map.num_entries(); ++e) {
    const auto [j, s] = map.entry(e);
    const QuadRule& q = cutmesh.quad_volume(j, s);
    basis.eval(mesh.cell_box(j), q.points, B);
    b.segment(map.entry_offset(e), N) += B.transpose() * q.weights.cwiseProduct(values(q, problem.source, s));
  }

  for (int f = 0; f < static_cast<int>(mesh.faces().size()); ++f) {
    const Face& face = mesh.faces()[f];
    if (!face.boundary()) continue;
    for (const FacePatch& p : cutmesh.face_patches(f)) {
      const QuadRule& q = p.rule;
      if (q.empty()) continue;
      const Species s = p.in_species;
      const int e = map.entry_of(face.in, s);
      basis.eval(mesh.cell_box(face.in), q.points, B, &G);
      if (problem.boundary_type(face.axis, face.side) == BoundaryType::Neumann) {
        b.segment(map.entry_offset(e), N) += B.transpose() * q.weights.cwiseProduct(values(q, problem.neumann, s));
        continue;
      }
      const double mu = problem.mu(s);
      const double eta = penalty_eta(scales, face.in, s, -1, s, k, penalty);
      const Eigen::MatrixXd dn = G[face.axis] * (face.side == 1 ? 1.0 : -1.0);
      const Eigen::VectorXd wg = q.weights.cwiseProduct(values(q, problem.dirichlet, s));
      b.segment(map.entry_offset(e), N) += mu * (eta * B.transpose() * wg - dn.transpose() * wg);
    }
  }

  if (ortho) {
    for (int e = 0; e < map.num_entries(); ++e) {
      const auto [j, s] = map.entry(e);
      if (!ortho->identity(j, s))
        b.segment(map.entry_offset(e), N) = ortho->S(j, s).transpose() * b.segment(map.entry_offset(e), N);
    }
  }
  return b;
}

double l2_error(const Eigen::VectorXd& u, const SpeciesField& exact, const CutCellMesh& cutmesh,
                const XdgIndexMap& map, const ReferenceBasis& basis, const SpeciesOrthoBlocks* ortho) {
  check_layout(cutmesh, map, basis);
  if (u.size() != map.size())
    throw Error(ErrorKind::DimensionMismatch, "solution length does not match the index map");
  const int N = basis.size();
  Eigen::MatrixXd B;
  double sum = 0.0;
  for (int e = 0; e < map.num_entries(); ++e) {
    const auto [j, s] = map.entry(e);
    const QuadRule& q = cutmesh.quad_volume(j, s);
    basis.eval(cutmesh.mesh().cell_box(j), q.points, B);
    Eigen::VectorXd c = u.segment(map.entry_offset(e), N);
    if (ortho && !ortho->identity(j, s)) c = ortho->S(j, s) * c;
    const Eigen::VectorXd uh = B * c;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      const double d = uh[i] - exact(q.points.col(i), s);
      sum += q.weights[i] * d * d;
    }
  }
  return std::sqrt(std::max(sum, 0.0));
}

Eigen::VectorXd l2_project(const SpeciesField& field, const CutCellMesh& cutmesh, const XdgIndexMap& map,
                           const ReferenceBasis& basis, const SpeciesOrthoBlocks* ortho) {
  check_layout(cutmesh, map, basis);
  const int N = basis.size();
  Eigen::VectorXd u(map.size());
  Eigen::MatrixXd B;
  for (int e = 0; e < map.num_entries(); ++e) {
    const auto [j, s] = map.entry(e);
    const QuadRule& q = cutmesh.quad_volume(j, s);
    basis.eval(cutmesh.mesh().cell_box(j), q.points, B);
    Eigen::VectorXd f(q.size());
    for (Eigen::Index i = 0; i < q.size(); ++i) f[i] = field(q.points.col(i), s);
    const Eigen::VectorXd rhs = B.transpose() * q.weights.cwiseProduct(f);
    if (ortho) {
      u.segment(map.entry_offset(e), N) = ortho->S(j, s).transpose() * rhs;
    } else {
      const Eigen::MatrixXd mass = B.transpose() * q.weights.asDiagonal() * B;
      u.segment(map.entry_offset(e), N) = mass.ldlt().solve(rhs);
    }
  }
  return u;
}

}  // namespace xdg
