#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "support.hpp"
#include "xdg/cutcell.hpp"
#include "xdg/levelset.hpp"
#include "xdg/quadrature.hpp"

using namespace xdg;
using test::box;
using test::error_kind;
using test::vec;

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int n) { return std::tgamma(n + 1.0); }

// Area of {n.x < c} inside an axis-aligned rectangle by polygon clipping.
double clipped_area(const Box& b, const Eigen::Vector2d& n, double c) {
  std::vector<Eigen::Vector2d> poly = {{b.lo[0], b.lo[1]}, {b.hi[0], b.lo[1]}, {b.hi[0], b.hi[1]}, {b.lo[0], b.hi[1]}};
  std::vector<Eigen::Vector2d> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Eigen::Vector2d p = poly[i], q = poly[(i + 1) % poly.size()];
    const double fp = n.dot(p) - c, fq = n.dot(q) - c;
    if (fp <= 0) out.push_back(p);
    if ((fp < 0) != (fq < 0) && fp != fq) out.push_back(p + fp / (fp - fq) * (q - p));
  }
  double area = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& p = out[i];
    const auto& q = out[(i + 1) % out.size()];
    area += p[0] * q[1] - p[1] * q[0];
  }
  return 0.5 * std::abs(area);
}

double total_volume(const CutCellMesh& cm, Species s) {
  double v = 0.0;
  for (int j = 0; j < cm.num_cells(); ++j) v += cm.volume(j, s);
  return v;
}

double total_interface(const CutCellMesh& cm) {
  double v = 0.0;
  for (int j = 0; j < cm.num_cells(); ++j)
    if (cm.is_cut(j)) v += cm.interface_measure(j);
  return v;
}

}  // namespace

TEST_CASE("gauss rules integrate polynomials exactly") {
  for (int n = 1; n <= 6; ++n) {
    Eigen::VectorXd x, w;
    gauss_jacobi_01(n, 0, x, w);
    for (int p = 0; p <= 2 * n - 1; ++p) CHECK((w.array() * x.array().pow(p)).sum() == doctest::Approx(1.0 / (p + 1)));
    gauss_jacobi_01(n, 1, x, w);
    for (int p = 0; p <= 2 * n - 1; ++p) CHECK((w.array() * x.array().pow(p)).sum() == doctest::Approx(1.0 / (p + 2)));
  }
  const QuadRule r = tensor_rule(box({0, -1}, {2, 1}), 4);
  double s = 0.0;
  for (Eigen::Index q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points(0, q), 3) * std::pow(r.points(1, q), 4);
  CHECK(s == doctest::Approx(4.0 * 2.0 / 5.0));
}

TEST_CASE("simplex rules integrate monomials exactly") {
  Eigen::MatrixXd tri(2, 3);
  tri << 0, 1, 0, 0, 0, 1;
  Eigen::MatrixXd tet(3, 4);
  tet << 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1;
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; a + b <= 4; ++b) {
      const QuadRule r = simplex_rule(tri, 4);
      double s = 0.0;
      for (Eigen::Index q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points(0, q), a) * std::pow(r.points(1, q), b);
      CHECK(s == doctest::Approx(factorial(a) * factorial(b) / factorial(a + b + 2)));
      const QuadRule t = simplex_rule(tet, 4);
      s = 0.0;
      for (Eigen::Index q = 0; q < t.size(); ++q)
        s += t.weights[q] * std::pow(t.points(0, q), a) * std::pow(t.points(2, q), b);
      CHECK(s == doctest::Approx(factorial(a) * factorial(b) / factorial(a + b + 3)));
    }
  CHECK(simplex_measure(tri) == doctest::Approx(0.5));
  CHECK(simplex_measure(tet) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("disk of radius 0.7 cuts all four cells of a 2x2 mesh") {
  const CutCellMesh cm =
      classify_and_build(build_cartesian(-1.0, 1.0, 2, 2), levelsets::sphere(vec({0, 0}), 0.7), 3, 6);
  for (int j = 0; j < 4; ++j) CHECK(cm.is_cut(j));
  CHECK(cm.num_cut_cells() == 8);
}

TEST_CASE("constant level sets give single-species cells") {
  const CutCellMesh cm = classify_and_build(build_cartesian(-1.0, 1.0, 2, 2), levelsets::constant(-1.0), 3, 6);
  for (int j = 0; j < 4; ++j) {
    CHECK(cm.fraction(j, Species::A) == 1.0);
    CHECK_FALSE(cm.present(j, Species::B));
  }
  CHECK(error_kind([&] { cm.quad_volume(0, Species::B); }) == ErrorKind::MissingSpecies);
  CHECK(error_kind([&] { cm.quad_interface(0); }) == ErrorKind::MissingInterface);
}

TEST_CASE("interface on mesh faces leaves every cell uncut") {
  const CutCellMesh cm = classify_and_build(build_cartesian(-1.0, 1.0, 2, 2), levelsets::plane(vec({1, 0}), 0.0), 3, 6);
  for (int j = 0; j < 4; ++j) {
    CHECK_FALSE(cm.is_cut(j));
    const Species s = cm.mesh().cell_box(j).center()[0] < 0 ? Species::A : Species::B;
    CHECK(cm.fraction(j, s) == 1.0);
  }
}

TEST_CASE("vanishing level set is degenerate") {
  CHECK(error_kind([] { classify_and_build(build_cartesian(-1.0, 1.0, 2, 2), levelsets::constant(0.0), 3, 6); }) ==
        ErrorKind::DegenerateLevelSet);
}

TEST_CASE("disk area and perimeter") {
  const LevelSet phi = levelsets::sphere(vec({0, 0}), 0.7);
  const CutCellMesh cm = classify_and_build(build_cartesian(-1.0, 1.0, 4, 2), phi, 5, 6);
  CHECK(std::abs(total_volume(cm, Species::A) - kPi * 0.49) / (kPi * 0.49) <= 1e-3);
  CHECK(std::abs(total_volume(cm, Species::A) + total_volume(cm, Species::B) - 4.0) <= 1e-10);
  CHECK(std::abs(total_interface(cm) - 2 * kPi * 0.7) / (2 * kPi * 0.7) <= 1e-2);
}

TEST_CASE("interface normals are unit and radial") {
  const CutCellMesh cm =
      classify_and_build(build_cartesian(-1.0, 1.0, 4, 2), levelsets::sphere(vec({0, 0}), 0.7), 3, 6);
  for (int j = 0; j < cm.num_cells(); ++j) {
    if (!cm.is_cut(j)) continue;
    const QuadRule& r = cm.quad_interface(j);
    REQUIRE(r.has_normals());
    for (Eigen::Index q = 0; q < r.size(); ++q) {
      const Eigen::VectorXd n = r.normals.col(q);
      CHECK(std::abs(n.norm() - 1.0) <= 1e-12);
      const Eigen::VectorXd x = r.points.col(q);
      CHECK(n.dot(x) >= 0.99 * x.norm());
    }
  }
}

TEST_CASE("straight interface gives exact measures") {
  const CutCellMesh cm =
      classify_and_build(build_cartesian(box({0, 0}, {1, 1}), {1, 1}), levelsets::plane(vec({1, 0}), 0.25), 2, 4);
  CHECK(std::abs(cm.volume(0, Species::A) - 0.25) <= 1e-12);
  CHECK(std::abs(cm.volume(0, Species::B) - 0.75) <= 1e-12);
  CHECK(std::abs(cm.interface_measure(0) - 1.0) <= 1e-12);
  // The interface lies on sub-box faces from depth 2 on.
  for (int depth = 0; depth <= 4; ++depth) {
    const CutCellMesh d = classify_and_build(cm.mesh(), cm.level_set(), depth, 4);
    CHECK(std::abs(d.interface_measure(0) - 1.0) <= 1e-12);
    CHECK(std::abs(d.volume(0, Species::A) - 0.25) <= 1e-12);
  }
}

TEST_CASE("tilted plane volumes match polygon clipping") {
  const Eigen::Vector2d n = Eigen::Vector2d(0.3, 1.0).normalized();
  const double c = 0.1;
  const BackgroundMesh mesh = build_cartesian(-1.0, 1.0, 3, 2);
  const CutCellMesh cm = classify_and_build(mesh, levelsets::plane(n, c), 1, 4);
  for (int j = 0; j < mesh.num_cells(); ++j) {
    const double a = clipped_area(mesh.cell_box(j), n, c);
    CHECK(std::abs(cm.volume(j, Species::A) - a) <= 1e-12);
    CHECK(std::abs(cm.volume(j, Species::B) - (mesh.cell_volume() - a)) <= 1e-12);
  }
  // The line n.x = c enters at x = -1 and leaves at x = 1.
  auto y_at = [&](double x) { return (c - n[0] * x) / n[1]; };
  const double len = std::hypot(2.0, y_at(1.0) - y_at(-1.0));
  CHECK(std::abs(total_interface(cm) - len) <= 1e-12);
}

TEST_CASE("face crossed by the interface splits between the species") {
  const BackgroundMesh mesh = build_cartesian(box({-1, -1}, {1, 1}), {2, 1});
  const CutCellMesh cm = classify_and_build(mesh, levelsets::plane(vec({0, 1}), 0.0), 3, 4);
  REQUIRE(!mesh.faces()[0].boundary());
  CHECK(std::abs(cm.face_measure(0, 0, Species::A) - 1.0) <= 1e-12);
  CHECK(std::abs(cm.face_measure(0, 0, Species::B) - 1.0) <= 1e-12);
  CHECK(std::abs(cm.face_measure(0, 1, Species::A) - 1.0) <= 1e-12);
}

TEST_CASE("species measures partition each face") {
  const BackgroundMesh mesh = build_cartesian(-1.0, 1.0, 3, 3);
  const CutCellMesh cm = classify_and_build(mesh, levelsets::benchmark(), 3, 6);
  for (int f = 0; f < static_cast<int>(mesh.faces().size()); ++f) {
    const Face& face = mesh.faces()[f];
    const double full = mesh.face_area(face.axis);
    double sum = 0.0;
    for (Species s : kSpecies) sum += cm.face_measure(f, face.in, s);
    CHECK(std::abs(sum - full) <= 1e-10 * full);
  }
}

TEST_CASE("pure cell weights sum to the cell volume") {
  const CutCellMesh cm = classify_and_build(build_cartesian(-1.0, 1.0, 4, 3), levelsets::benchmark(), 3, 6);
  const double vol = cm.mesh().cell_volume();
  for (int j = 0; j < cm.num_cells(); ++j) {
    for (Species s : kSpecies)
      if (cm.present(j, s)) CHECK(std::abs(cm.quad_volume(j, s).measure() - cm.volume(j, s)) <= 1e-12 * vol);
    if (!cm.is_cut(j)) {
      const Species s = cm.present(j, Species::A) ? Species::A : Species::B;
      CHECK(std::abs(cm.quad_volume(j, s).measure() - vol) <= 1e-13);
    }
  }
}

TEST_CASE("benchmark species volume agrees with Monte Carlo sampling") {
  const CutCellMesh cm = classify_and_build(build_cartesian(-1.0, 1.0, 4, 3), levelsets::benchmark(), 3, 6);
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 4'000'000;
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    const double x = u(gen), y = u(gen), z = u(gen);
    inside += x * x + y * y + z * z * z - 0.49 < 0.0;
  }
  const double p = static_cast<double>(inside) / n;
  const double sigma = 8.0 * std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(total_volume(cm, Species::A) - 8.0 * p) <= 3.0 * sigma);
}

TEST_CASE("moment-fitted rules keep the cut-cell volumes") {
  const BackgroundMesh mesh = build_cartesian(-1.0, 1.0, 4, 3);
  const CutCellMesh plain = classify_and_build(mesh, levelsets::benchmark(), 3, 6);
  const CutCellMesh fitted = classify_and_build(mesh, levelsets::benchmark(), 3, 6, 4);
  for (int j = 0; j < mesh.num_cells(); ++j)
    for (Species s : kSpecies) {
      if (!plain.present(j, s)) continue;
      CHECK(std::abs(fitted.quad_volume(j, s).measure() - plain.volume(j, s)) <= 1e-12);
      // Second moments are reproduced as well.
      const QuadRule& a = plain.quad_volume(j, s);
      const QuadRule& b = fitted.quad_volume(j, s);
      const double ma = (a.weights.array() * a.points.row(0).transpose().array().square()).sum();
      const double mb = (b.weights.array() * b.points.row(0).transpose().array().square()).sum();
      CHECK(std::abs(ma - mb) <= 1e-11);
    }
}

TEST_CASE("disk area error drops with subdivision depth") {
  const LevelSet phi = levelsets::sphere(vec({0, 0}), 0.7);
  const BackgroundMesh mesh = build_cartesian(-1.0, 1.0, 2, 2);
  double prev = 0.0;
  for (int depth = 2; depth <= 5; ++depth) {
    const double err = std::abs(total_volume(classify_and_build(mesh, phi, depth, 6), Species::A) - kPi * 0.49);
    if (depth > 2) CHECK(prev / err >= 3.0);
    prev = err;
  }
}
