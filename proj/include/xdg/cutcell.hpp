#pragma once

#include <array>
#include <vector>

#include "xdg/levelset.hpp"
#include "xdg/mesh.hpp"
#include "xdg/quadrature.hpp"

namespace xdg {

/// Part of a mesh face coupling species `in_species` of the face's in-cell
/// with `out_species` of its out-cell. The two species differ only when the
/// interface coincides with the face.
struct FacePatch {
  Species in_species = Species::A;
  Species out_species = Species::A;
  QuadRule rule;
};

struct CutCellOptions {
  int quad_depth = 3;
  int gauss_order = 6;
  /// When >= 0, cut-cell volume rules are compressed onto a tensor Gauss
  /// grid of fit_order+1 points per axis that reproduces all moments of
  /// total degree <= fit_order of the subdivision rule.
  int fit_order = -1;
};

/// Background mesh intersected with the two phases of a level-set.
class CutCellMesh {
 public:
  CutCellMesh(BackgroundMesh mesh, LevelSet phi, CutCellOptions options);

  const BackgroundMesh& mesh() const { return mesh_; }
  const LevelSet& level_set() const { return phi_; }
  const CutCellOptions& options() const { return options_; }
  int dim() const { return mesh_.dim(); }
  int num_cells() const { return mesh_.num_cells(); }

  bool present(int j, Species s) const { return cells_[j].volume[index(s)] > 0.0; }
  bool is_cut(int j) const { return present(j, Species::A) && present(j, Species::B); }
  double volume(int j, Species s) const { return cells_[j].volume[index(s)]; }
  double fraction(int j, Species s) const { return volume(j, s) / mesh_.cell_volume(); }
  double interface_measure(int j) const { return cells_[j].interface.measure(); }

  /// Throws MissingSpecies when s is absent in cell j.
  const QuadRule& quad_volume(int j, Species s) const;
  /// Throws MissingInterface when cell j is not cut.
  const QuadRule& quad_interface(int j) const;
  /// Union of the patches of `face` whose in-side species is s. Throws
  /// MissingSpecies when s is absent on both sides of the face.
  QuadRule quad_cut_face(int face, Species s) const;
  const std::vector<FacePatch>& face_patches(int face) const { return faces_[face]; }
  /// (D-1)-measure of the part of `face` that bounds species s of cell j.
  double face_measure(int face, int j, Species s) const;

  /// Number of (cell, species) pairs with positive volume.
  int num_cut_cells() const;

 private:
  struct CellData {
    std::array<double, 2> volume{0.0, 0.0};
    std::array<QuadRule, 2> rules;
    QuadRule interface;
  };

  void build_cell(int j);
  void build_face(int f);

  BackgroundMesh mesh_;
  LevelSet phi_;
  CutCellOptions options_;
  std::vector<CellData> cells_;
  std::vector<std::vector<FacePatch>> faces_;
};

CutCellMesh classify_and_build(const BackgroundMesh& mesh, const LevelSet& phi, int quad_depth,
                               int gauss_order, int fit_order = -1);

}  // namespace xdg
