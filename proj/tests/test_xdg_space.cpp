#include <cmath>

#include <doctest.h>

#include "support.hpp"
#include "xdg/basis.hpp"
#include "xdg/cutcell.hpp"
#include "xdg/levelset.hpp"
#include "xdg/quadrature.hpp"
#include "xdg/xdg_space.hpp"

using namespace xdg;
using test::box;
using test::error_kind;
using test::vec;

namespace {

// Gram matrix of the cell basis under a quadrature rule.
Eigen::MatrixXd gram(const ReferenceBasis& basis, const Box& cell, const QuadRule& rule) {
  Eigen::MatrixXd v;
  basis.eval(cell, rule.points, v);
  return v.transpose() * rule.weights.asDiagonal() * v;
}

}  // namespace

TEST_CASE("basis dimensions") {
  CHECK(basis_dimension(2, 3) == 10);
  CHECK(basis_dimension(3, 3) == 20);
  CHECK(basis_dimension(5, 3) == 56);
  CHECK(basis_dimension(2, 2) == 6);
  CHECK(ReferenceBasis(2, 3).size() == 10);
  CHECK(ReferenceBasis(3, 3).size_up_to(1) == 4);
}

TEST_CASE("basis moments match weighted sums of values") {
  for (int dim : {1, 2, 3}) {
    const Box cell = dim == 1 ? box({-1}, {0.5}) : dim == 2 ? box({0, 1}, {2, 1.5}) : box({0.5, -1, 2}, {1, 0, 4});
    const ReferenceBasis basis(4, dim);
    Eigen::MatrixXd points = test::random_matrix(dim, 37, 7 + dim);
    for (int d = 0; d < dim; ++d)
      points.row(d) = (cell.lo[d] + 0.5 * (points.row(d).array() + 1.0) * (cell.hi[d] - cell.lo[d])).matrix();
    const Eigen::VectorXd w = test::random_vector(37, 11 + dim);
    Eigen::MatrixXd v;
    basis.eval(cell, points, v);
    CHECK((basis.moments(cell, points, w) - v.transpose() * w).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("reference basis is orthonormal on boxes") {
  const Box cell = box({0.5, -1, 2}, {1, 0, 4});
  for (int k : {0, 2, 4}) {
    const ReferenceBasis basis(k, 3);
    const Eigen::MatrixXd g = gram(basis, cell, tensor_rule(cell, 2 * k));
    CHECK((g - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("constant mode and total-degree ordering") {
  const ReferenceBasis basis(3, 3);
  const Box cell = box({0, 0, 0}, {2, 1, 0.5});
  Eigen::MatrixXd v;
  basis.eval(cell, cell.center(), v);
  CHECK(v(0, 0) == doctest::Approx(1.0 / std::sqrt(cell.volume())));
  int prev = 0;
  for (int n = 0; n < basis.size(); ++n) {
    const auto& e = basis.exponents(n);
    const int deg = e[0] + e[1] + e[2];
    CHECK(deg >= prev);
    prev = deg;
  }
}

TEST_CASE("basis gradients agree with finite differences") {
  const ReferenceBasis basis(3, 3);
  const Box cell = box({-1, 0, 1}, {0, 0.5, 2});
  const Eigen::VectorXd x = vec({-0.3, 0.2, 1.7});
  Eigen::MatrixXd v;
  std::vector<Eigen::MatrixXd> g;
  basis.eval(cell, x, v, &g);
  const double h = 1e-6;
  for (int d = 0; d < 3; ++d) {
    Eigen::VectorXd xp = x, xm = x;
    xp[d] += h;
    xm[d] -= h;
    Eigen::MatrixXd vp, vm;
    basis.eval(cell, xp, vp);
    basis.eval(cell, xm, vm);
    const Eigen::MatrixXd fd = (vp - vm) / (2 * h);
    CHECK((fd - g[d]).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("benchmark DOF counts on the 2x2x2 mesh") {
  const CutCellMesh cm = classify_and_build(build_cartesian(-1.0, 1.0, 2, 3), levelsets::benchmark(), 3, 6);
  CHECK(build_index_map(cm, {2}).size() == 160);
  CHECK(build_index_map(cm, {3}).size() == 320);
  CHECK(build_index_map(cm, {5}).size() == 896);
}

TEST_CASE("single pure cell carries one block") {
  const CutCellMesh cm =
      classify_and_build(build_cartesian(box({0, 0, 0}, {1, 1, 1}), {1, 1, 1}), levelsets::constant(-1.0), 3, 6);
  const XdgIndexMap map = build_index_map(cm, {2});
  CHECK(map.size() == 10);
  CHECK(map.num_entries() == 1);
  CHECK(map.entry_of(0, Species::B) == -1);
  CHECK(error_kind([&] { map.index(0, 0, Species::B, 0); }) == ErrorKind::InvalidInput);
}

TEST_CASE("index map is a bijection and DOFs add up") {
  const CutCellMesh cm = classify_and_build(build_cartesian(-1.0, 1.0, 3, 3), levelsets::benchmark(), 3, 6);
  const XdgIndexMap map = build_index_map(cm, {2, 1});
  int expected = 0;
  for (int j = 0; j < cm.num_cells(); ++j)
    for (Species s : kSpecies)
      if (cm.present(j, s)) expected += 10 + 4;
  CHECK(map.size() == expected);
  int prev = -1;
  for (int flat = 0; flat < map.size(); ++flat) {
    const MultiIndex m = map.inverse(flat);
    CHECK(map.index(m.cell, m.variable, m.species, m.mode) == flat);
    // Cells ascending, then species.
    const int key = 2 * m.cell + index(m.species);
    CHECK(key >= prev);
    prev = key;
  }
}

TEST_CASE("low and high mode index sets") {
  const CutCellMesh cm = classify_and_build(build_cartesian(-1.0, 1.0, 2, 3), levelsets::benchmark(), 3, 6);
  const XdgIndexMap map = build_index_map(cm, {2});
  const auto low = map.indices_up_to({0, 1}, 4);
  const auto high = map.indices_above(0, 4);
  CHECK(low.size() == static_cast<std::size_t>(4 * (map.entries_of_cell(0).size() + map.entries_of_cell(1).size())));
  CHECK(high.size() == 6 * map.entries_of_cell(0).size());
  for (int i : high) CHECK(map.inverse(i).mode >= 4);
  for (int i : low) CHECK(map.inverse(i).mode < 4);
}

TEST_CASE("uncut cells keep the identity factor") {
  const CutCellMesh cm =
      classify_and_build(build_cartesian(-1.0, 1.0, 4, 2), levelsets::sphere(vec({0, 0}), 0.7), 3, 6);
  const ReferenceBasis basis(2, 2);
  const SpeciesOrthoBlocks ortho = build_species_orthonormalization(cm, basis);
  for (int j = 0; j < cm.num_cells(); ++j) {
    if (cm.is_cut(j)) continue;
    const Species s = cm.present(j, Species::A) ? Species::A : Species::B;
    CHECK(ortho.identity(j, s));
    CHECK((ortho.S(j, s) - Eigen::MatrixXd::Identity(6, 6)).norm() == 0.0);
  }
}

TEST_CASE("half cell scales the constant mode by sqrt 2") {
  const CutCellMesh cm =
      classify_and_build(build_cartesian(-1.0, 1.0, 1, 2), levelsets::plane(vec({1, 0}), 0.0), 3, 6);
  const SpeciesOrthoBlocks ortho = build_species_orthonormalization(cm, ReferenceBasis(1, 2));
  for (Species s : kSpecies) CHECK(ortho.S(0, s)(0, 0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("cut-cell factors orthonormalize the species mass") {
  const CutCellMesh cm =
      classify_and_build(build_cartesian(-1.0, 1.0, 2, 2), levelsets::sphere(vec({0, 0}), 0.7), 3, 6);
  const ReferenceBasis basis(3, 2);
  const SpeciesMass mass(cm, basis);
  const SpeciesOrthoBlocks ortho = build_species_orthonormalization(cm, basis);
  for (int j = 0; j < cm.num_cells(); ++j)
    for (Species s : kSpecies) {
      if (!cm.present(j, s)) continue;
      const Eigen::MatrixXd& S = ortho.S(j, s);
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(basis.size(), basis.size());
      CHECK((S.transpose() * mass(j, s) * S - I).norm() <= 1e-10);
      // Same check against a Gram matrix from the raw cut-cell rule.
      const Eigen::MatrixXd g = gram(basis, cm.mesh().cell_box(j), cm.quad_volume(j, s));
      CHECK((S.transpose() * g * S - I).norm() <= 1e-8);
      CHECK(S.isUpperTriangular());
    }
}

TEST_CASE("slivers fail the orthonormalization") {
  const CutCellMesh cm =
      classify_and_build(build_cartesian(-1.0, 1.0, 1, 2), levelsets::plane(vec({1, 0}), -1.0 + 2e-9), 3, 6);
  REQUIRE(cm.is_cut(0));
  CHECK(error_kind([&] { build_species_orthonormalization(cm, ReferenceBasis(2, 2)); }) ==
        ErrorKind::InsufficientAgglomeration);
}
