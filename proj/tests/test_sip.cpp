#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <doctest.h>

#include "support.hpp"
#include "xdg/agglomeration.hpp"
#include "xdg/basis.hpp"
#include "xdg/cutcell.hpp"
#include "xdg/levelset.hpp"
#include "xdg/multigrid.hpp"
#include "xdg/sip.hpp"
#include "xdg/xdg_space.hpp"

using namespace xdg;
using test::box;
using test::vec;

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] via Golub-Welsch.
void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) J(i, i - 1) = J(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x = es.eigenvalues();
  w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
}

// Orthonormal Legendre factor on [lo, lo + h] and its derivative.
double leg(int m, double lo, double h, double x) {
  return std::sqrt((2 * m + 1) / h) * std::legendre(m, 2 * (x - lo) / h - 1);
}
double dleg(int m, double lo, double h, double x) {
  double d = 0.0;
  for (int k = m - 1; k >= 0; k -= 2) d += (2 * k + 1) * std::legendre(k, 2 * (x - lo) / h - 1);
  return std::sqrt((2 * m + 1) / h) * d * 2 / h;
}

struct Cell2 {
  double x0, y0, hx, hy;
};

// Plain symmetric interior penalty matrix on an nx x ny Cartesian grid of
// (-1,1)^2 with constant coefficient and Dirichlet walls, written out face by
// face. Modes follow `basis` ordering.
Eigen::MatrixXd sip_oracle(int nx, int ny, const ReferenceBasis& basis, double mu, double c_eta) {
  const int N = basis.size(), k = basis.degree();
  const double hx = 2.0 / nx, hy = 2.0 / ny;
  const double hprime = 2 * hx * hy / (2 * hx + 2 * hy);
  const double eta = c_eta * k * k / hprime;
  auto cell = [&](int i, int j) { return Cell2{-1 + i * hx, -1 + j * hy, hx, hy}; };
  auto phi = [&](const Cell2& c, int n, double x, double y) {
    const auto& e = basis.exponents(n);
    return leg(e[0], c.x0, c.hx, x) * leg(e[1], c.y0, c.hy, y);
  };
  auto grad = [&](const Cell2& c, int n, double x, double y, int d) {
    const auto& e = basis.exponents(n);
    return d == 0 ? dleg(e[0], c.x0, c.hx, x) * leg(e[1], c.y0, c.hy, y)
                  : leg(e[0], c.x0, c.hx, x) * dleg(e[1], c.y0, c.hy, y);
  };
  Eigen::VectorXd g, gw;
  gauss_legendre(k + 2, g, gw);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nx * ny * N, nx * ny * N);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Cell2 c = cell(i, j);
      const int o = (j * nx + i) * N;
      for (int a = 0; a < g.size(); ++a)
        for (int b = 0; b < g.size(); ++b) {
          const double x = c.x0 + (g[a] + 1) * hx / 2, y = c.y0 + (g[b] + 1) * hy / 2;
          const double w = gw[a] * gw[b] * hx * hy / 4;
          for (int p = 0; p < N; ++p)
            for (int q = 0; q < N; ++q)
              A(o + p, o + q) += w * mu * (grad(c, p, x, y, 0) * grad(c, q, x, y, 0) + grad(c, p, x, y, 1) * grad(c, q, x, y, 1));
        }
    }
  // Face contributions: each face has cells L (or none) and R (or none) along axis d.
  auto face = [&](int d, int iL, int jL, int iR, int jR, double pos) {
    const bool hasL = iL >= 0 && jL >= 0, hasR = iR < nx && jR < ny;
    const double len = d == 0 ? hy : hx;
    const double lo = d == 0 ? -1 + (hasL ? jL : jR) * hy : -1 + (hasL ? iL : iR) * hx;
    for (int a = 0; a < g.size(); ++a) {
      const double t = lo + (g[a] + 1) * len / 2, w = gw[a] * len / 2;
      const double x = d == 0 ? pos : t, y = d == 0 ? t : pos;
      // Side data: offset, jump sign, average weight.
      struct S { int off; Cell2 c; double sign; };
      std::vector<S> sides;
      if (hasL) sides.push_back({(jL * nx + iL) * N, cell(iL, jL), 1.0});
      if (hasR) sides.push_back({(jR * nx + iR) * N, cell(iR, jR), -1.0});
      const double avg = sides.size() == 2 ? 0.5 : 1.0;
      // The outward normal of a single-sided face flips with the side.
      const double nsign = hasL ? 1.0 : -1.0;
      for (const S& X : sides)
        for (const S& Y : sides)
          for (int p = 0; p < N; ++p)
            for (int q = 0; q < N; ++q) {
              const double vx = phi(X.c, p, x, y), vy = phi(Y.c, q, x, y);
              const double dx = grad(X.c, p, x, y, d) * nsign, dy = grad(Y.c, q, x, y, d) * nsign;
              const double jx = sides.size() == 2 ? X.sign : 1.0, jy = sides.size() == 2 ? Y.sign : 1.0;
              A(X.off + p, Y.off + q) += w * mu * (-avg * dy * jx * vx - avg * dx * jy * vy + eta * jx * jy * vx * vy);
            }
    }
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) face(0, i - 1, j, i, j, -1 + i * hx);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j <= ny; ++j) face(1, i, j - 1, i, j, -1 + j * hy);
  return A;
}

struct Setup {
  CutCellMesh cm;
  ReferenceBasis basis;
  XdgIndexMap map;
  PenaltyScales scales;
};

Setup make(const BackgroundMesh& mesh, const LevelSet& phi, int k, double alpha = 0.1) {
  CutCellMesh cm = classify_and_build(mesh, phi, 3, 2 * k + 2);
  ReferenceBasis basis(k, mesh.dim());
  XdgIndexMap map = build_index_map(cm, {k});
  PenaltyScales scales(cm, cut_aggregates(cm, small_cell_agglomeration_map(cm, alpha)));
  return Setup{std::move(cm), basis, std::move(map), std::move(scales)};
}

double max_asymmetry(const Eigen::MatrixXd& A) { return (A - A.transpose()).cwiseAbs().maxCoeff() / A.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("penalty on an uncut unit cube") {
  const Setup s = make(build_cartesian(box({0, 0, 0}, {1, 1, 1}), {1, 1, 1}), levelsets::constant(-1.0), 2);
  CHECK(s.scales.length(0, Species::A) == doctest::Approx(0.5));
  CHECK(penalty_eta(s.scales, 0, Species::A, -1, Species::A, 2, PenaltyConfig{4.0}) == doctest::Approx(32.0));
  CHECK(penalty_eta(s.scales, 0, Species::A, -1, Species::A, 4, PenaltyConfig{4.0}) == doctest::Approx(128.0));
}

TEST_CASE("single-phase matrices match a face-by-face assembly") {
  for (auto [nx, ny, k] : {std::tuple{2, 1, 1}, std::tuple{3, 2, 2}, std::tuple{2, 2, 3}}) {
    const Setup s = make(build_cartesian(box({-1, -1}, {1, 1}), {nx, ny}), levelsets::constant(-1.0), k);
    PoissonProblem prob;
    prob.mu_a = 3.0;
    const Eigen::MatrixXd M = assemble_sip(s.cm, s.map, s.basis, prob, s.scales, PenaltyConfig{4.0}).to_dense();
    const Eigen::MatrixXd ref = sip_oracle(nx, ny, s.basis, 3.0, 4.0);
    CHECK((M - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("pure Neumann problem has the constants in its kernel") {
  const Setup s = make(build_cartesian(-1.0, 1.0, 2, 2), levelsets::constant(-1.0), 2);
  PoissonProblem prob;
  prob.boundary.fill(BoundaryType::Neumann);
  const auto M = assemble_sip(s.cm, s.map, s.basis, prob, s.scales, PenaltyConfig{});
  const Eigen::VectorXd one = l2_project([](const Eigen::VectorXd&, Species) { return 1.0; }, s.cm, s.map, s.basis);
  CHECK(bs_matvec(M, one).cwiseAbs().maxCoeff() <= 1e-12 * M.max_abs());
}

TEST_CASE("benchmark matrix is symmetric") {
  const Setup s = make(build_cartesian(-1.0, 1.0, 4, 3), levelsets::benchmark(), 2);
  PoissonProblem prob;
  prob.mu_b = 1000.0;
  CHECK(max_asymmetry(assemble_sip(s.cm, s.map, s.basis, prob, s.scales, PenaltyConfig{}).to_dense()) <= 1e-12);
}

TEST_CASE("benchmark matrix on the 2x2x2 mesh is positive definite") {
  const Setup s = make(build_cartesian(-1.0, 1.0, 2, 3), levelsets::benchmark(), 2);
  PoissonProblem prob;
  prob.mu_b = 1000.0;
  const Eigen::MatrixXd M = assemble_sip(s.cm, s.map, s.basis, prob, s.scales, PenaltyConfig{}).to_dense();
  REQUIRE(M.rows() == 160);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (M + M.transpose())).eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("right-hand side of constant sources and boundary data") {
  const Setup s = make(build_cartesian(box({0, 0}, {1, 1}), {1, 1}), levelsets::constant(-1.0), 1);
  PoissonProblem prob;
  Eigen::VectorXd b = assemble_rhs(s.cm, s.map, s.basis, prob, s.scales, PenaltyConfig{});
  CHECK(b[0] == doctest::Approx(1.0));
  CHECK(b.tail(b.size() - 1).cwiseAbs().maxCoeff() <= 1e-14);

  prob.source = [](const Eigen::VectorXd&, Species) { return 0.0; };
  CHECK(assemble_rhs(s.cm, s.map, s.basis, prob, s.scales, PenaltyConfig{}).norm() == 0.0);

  // Unit Neumann flux through the x = 1 wall only.
  prob.boundary.fill(BoundaryType::Neumann);
  prob.neumann = [](const Eigen::VectorXd& x, Species) { return x[0] > 1.0 - 1e-12 ? 1.0 : 0.0; };
  b = assemble_rhs(s.cm, s.map, s.basis, prob, s.scales, PenaltyConfig{});
  for (int n = 0; n < s.basis.size(); ++n) {
    const auto& e = s.basis.exponents(n);
    const double expected = e[1] > 0 ? 0.0 : (e[0] == 1 ? std::sqrt(3.0) : 1.0);
    CHECK(std::abs(b[n] - expected) <= 1e-13);
  }
}

TEST_CASE("L2 error of the zero function and of projections") {
  const Setup s = make(build_cartesian(-1.0, 1.0, 2, 3), levelsets::constant(-1.0), 1);
  const SpeciesField one = [](const Eigen::VectorXd&, Species) { return 1.0; };
  CHECK(l2_error(Eigen::VectorXd::Zero(s.map.size()), one, s.cm, s.map, s.basis) == doctest::Approx(std::sqrt(8.0)));

  const Setup p = make(build_cartesian(-1.0, 1.0, 3, 2), levelsets::plane(vec({1, 0.4}), 0.1), 2);
  const SpeciesField u = [](const Eigen::VectorXd& x, Species sp) {
    return sp == Species::A ? x[0] * x[1] - 1.0 : 2.0 * x[1] * x[1] + x[0];
  };
  CHECK(l2_error(l2_project(u, p.cm, p.map, p.basis), u, p.cm, p.map, p.basis) <= 1e-10);
}

TEST_CASE("piecewise quadratic two-phase solution is reproduced") {
  // Across the plane n.x = c: u_s = (n.x - c) / mu_s + (t.x)^2 with t orthogonal to n,
  // so [u] = 0, [mu du/dn] = 0 and -mu_s lap u_s = -2 mu_s.
  const Eigen::Vector2d n = Eigen::Vector2d(0.3, 1.0).normalized(), t(-n[1], n[0]);
  const double c = 0.1, mu_a = 1.0, mu_b = 1000.0;
  const Setup s = make(build_cartesian(-1.0, 1.0, 4, 2), levelsets::plane(n, c), 2);
  PoissonProblem prob;
  prob.mu_a = mu_a;
  prob.mu_b = mu_b;
  const SpeciesField exact = [=](const Eigen::VectorXd& x, Species sp) {
    const double mu = sp == Species::A ? mu_a : mu_b;
    return (n.dot(x) - c) / mu + std::pow(t.dot(x), 2);
  };
  prob.source = [=](const Eigen::VectorXd&, Species sp) { return -2.0 * (sp == Species::A ? mu_a : mu_b); };
  prob.dirichlet = exact;
  const auto M0 = assemble_sip(s.cm, s.map, s.basis, prob, s.scales, PenaltyConfig{});
  const Eigen::VectorXd b0 = assemble_rhs(s.cm, s.map, s.basis, prob, s.scales, PenaltyConfig{});
  const SpeciesMass mass(s.cm, s.basis);
  const auto h = build_hierarchy(s.cm, s.basis, mass, s.map, M0, b0, small_cell_agglomeration_map(s.cm, 0.1), 1);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(h.finest().M.to_sparse());
  const Eigen::VectorXd u = bs_matvec(h.P, Eigen::VectorXd(lu.solve(h.finest().b)));
  CHECK(l2_error(u, exact, s.cm, s.map, s.basis) <= 1e-8);
}
