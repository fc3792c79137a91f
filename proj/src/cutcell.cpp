#include "xdg/cutcell.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xdg/basis.hpp"
#include "xdg/error.hpp"

namespace xdg {

namespace {

constexpr double kZero = 1e-12;

// Simplices (as vertex matrices) on each side of a piecewise-linear zero set.
struct Pieces {
  std::vector<Eigen::MatrixXd> side[2];  // [0]: phi < 0, [1]: phi >= 0
  std::vector<Eigen::MatrixXd> iface;
};

Eigen::VectorXd crossing(const Eigen::MatrixXd& v, const Eigen::VectorXd& f, int a, int b) {
  const double t = f[a] / (f[a] - f[b]);
  return v.col(a) + t * (v.col(b) - v.col(a));
}

Eigen::MatrixXd cols(std::initializer_list<Eigen::VectorXd> pts) {
  Eigen::MatrixXd m(pts.begin()->size(), static_cast<Eigen::Index>(pts.size()));
  Eigen::Index i = 0;
  for (const auto& p : pts) m.col(i++) = p;
  return m;
}

// One vertex `a` alone on side `lone`; the others on the opposite side.
void clip_single(const Eigen::MatrixXd& v, const Eigen::VectorXd& f, int a, const std::vector<int>& o,
                 int lone, Pieces& out) {
  const int k = static_cast<int>(v.cols()) - 1;
  const int other = 1 - lone;
  if (k == 1) {
    const Eigen::VectorXd p = crossing(v, f, a, o[0]);
    out.side[lone].push_back(cols({v.col(a), p}));
    out.side[other].push_back(cols({p, v.col(o[0])}));
    out.iface.push_back(p);
  } else if (k == 2) {
    const Eigen::VectorXd pb = crossing(v, f, a, o[0]), pc = crossing(v, f, a, o[1]);
    out.side[lone].push_back(cols({v.col(a), pb, pc}));
    out.side[other].push_back(cols({pb, v.col(o[0]), v.col(o[1])}));
    out.side[other].push_back(cols({pb, v.col(o[1]), pc}));
    out.iface.push_back(cols({pb, pc}));
  } else {
    const Eigen::VectorXd pb = crossing(v, f, a, o[0]), pc = crossing(v, f, a, o[1]),
                          pd = crossing(v, f, a, o[2]);
    out.side[lone].push_back(cols({v.col(a), pb, pc, pd}));
    // prism (pb, pc, pd | b, c, d) split into three tetrahedra
    const Eigen::VectorXd b = v.col(o[0]), c = v.col(o[1]), d = v.col(o[2]);
    out.side[other].push_back(cols({pb, pc, pd, d}));
    out.side[other].push_back(cols({pb, pc, c, d}));
    out.side[other].push_back(cols({pb, b, c, d}));
    out.iface.push_back(cols({pb, pc, pd}));
  }
}

// Tetrahedron with vertices a0,a1 negative and b0,b1 non-negative.
void clip_pair(const Eigen::MatrixXd& v, const Eigen::VectorXd& f, int a0, int a1, int b0, int b1,
               Pieces& out) {
  const Eigen::VectorXd p00 = crossing(v, f, a0, b0), p01 = crossing(v, f, a0, b1);
  const Eigen::VectorXd p10 = crossing(v, f, a1, b0), p11 = crossing(v, f, a1, b1);
  // negative prism (a0, p00, p01 | a1, p10, p11)
  out.side[0].push_back(cols({v.col(a0), p00, p01, p11}));
  out.side[0].push_back(cols({v.col(a0), p00, p10, p11}));
  out.side[0].push_back(cols({v.col(a0), v.col(a1), p10, p11}));
  // positive prism (b0, p00, p10 | b1, p01, p11)
  out.side[1].push_back(cols({v.col(b0), p00, p10, p11}));
  out.side[1].push_back(cols({v.col(b0), p00, p01, p11}));
  out.side[1].push_back(cols({v.col(b0), v.col(b1), p01, p11}));
  out.iface.push_back(cols({p00, p01, p11}));
  out.iface.push_back(cols({p00, p11, p10}));
}

void clip_simplex(const Eigen::MatrixXd& v, const Eigen::VectorXd& f, Pieces& out) {
  std::vector<int> neg, pos;
  for (Eigen::Index i = 0; i < f.size(); ++i) (f[i] < 0.0 ? neg : pos).push_back(static_cast<int>(i));
  if (pos.empty()) {
    out.side[0].push_back(v);
  } else if (neg.empty()) {
    out.side[1].push_back(v);
  } else if (neg.size() == 1) {
    clip_single(v, f, neg[0], pos, 0, out);
  } else if (pos.size() == 1) {
    clip_single(v, f, pos[0], neg, 1, out);
  } else {
    clip_pair(v, f, neg[0], neg[1], pos[0], pos[1], out);
  }
}

struct Collector {
  QuadRule side[2];
  QuadRule iface;
};

class BoxIntegrator {
 public:
  BoxIntegrator(const LevelSet& phi, int max_depth, int order, bool want_iface, int iface_order = -1)
      : phi_(phi), max_depth_(max_depth), order_(order), iface_order_(iface_order < 0 ? order : iface_order),
        want_iface_(want_iface) {}

  void run(const Box& box, Collector& out) {
    root_ = box;
    recurse(box, 0, out);
  }

 private:
  void recurse(const Box& box, int depth, Collector& out) {
    const int D = box.dim();
    std::vector<int> active;
    for (int d = 0; d < D; ++d)
      if (box.hi[d] > box.lo[d]) active.push_back(d);
    const int a = static_cast<int>(active.size());

    // 3 probes per active axis; corners are the probes with index 0 or 2
    int nprobe = 1;
    for (int i = 0; i < a; ++i) nprobe *= 3;
    std::vector<double> probe(nprobe);
    bool has_neg = false, has_pos = false;
    Eigen::VectorXd x(D);
    for (int p = 0; p < nprobe; ++p) {
      x = box.lo;
      int rem = p;
      for (int i = 0; i < a; ++i) {
        const int d = active[i];
        x[d] = box.lo[d] + 0.5 * (rem % 3) * (box.hi[d] - box.lo[d]);
        rem /= 3;
      }
      probe[p] = phi_(x);
      has_neg |= probe[p] < -kZero;
      has_pos |= probe[p] > kZero;
    }
    if (depth > 0 && !(has_neg && has_pos) && (has_neg || has_pos)) {
      out.side[has_neg ? 0 : 1].append(tensor_rule(box, order_));
      if (has_neg && want_iface_) interface_on_faces(box, active, probe, out);
      return;
    }
    if (depth < max_depth_ && a > 0) {
      const int nchild = 1 << a;
      for (int c = 0; c < nchild; ++c) {
        Box child = box;
        for (int i = 0; i < a; ++i) {
          const int d = active[i];
          const double mid = 0.5 * (box.lo[d] + box.hi[d]);
          if (c & (1 << i))
            child.lo[d] = mid;
          else
            child.hi[d] = mid;
        }
        recurse(child, depth + 1, out);
      }
      return;
    }
    leaf(box, active, probe, out);
  }

  // A pure A sub-box whose face lies on the interface contributes that face,
  // unless the face is part of the cell boundary.
  void interface_on_faces(const Box& box, const std::vector<int>& active, const std::vector<double>& probe,
                          Collector& out) {
    const int a = static_cast<int>(active.size());
    for (int i = 0; i < a; ++i) {
      const int d = active[i];
      for (int side = 0; side < 2; ++side) {
        const double wall = side ? box.hi[d] : box.lo[d];
        if (wall == (side ? root_.hi[d] : root_.lo[d])) continue;
        bool zero = true;
        for (int p = 0, stride = static_cast<int>(std::pow(3, i)); p < static_cast<int>(probe.size()) && zero; ++p)
          if ((p / stride) % 3 == 2 * side) zero = std::abs(probe[p]) <= kZero;
        if (!zero) continue;
        Box face = box;
        face.lo[d] = face.hi[d] = wall;
        QuadRule r = tensor_rule(face, iface_order_);
        r.normals.resize(box.dim(), r.size());
        for (Eigen::Index q = 0; q < r.size(); ++q) r.normals.col(q) = phi_.normal(r.points.col(q));
        out.iface.append(r);
      }
    }
  }

  void leaf(const Box& box, const std::vector<int>& active, const std::vector<double>& probe,
            Collector& out) {
    const int D = box.dim();
    const int a = static_cast<int>(active.size());
    auto corner = [&](int mask) {
      Eigen::VectorXd x = box.lo;
      int p = 0, stride = 1;
      for (int i = 0; i < a; ++i) {
        if (mask & (1 << i)) {
          x[active[i]] = box.hi[active[i]];
          p += 2 * stride;
        }
        stride *= 3;
      }
      return std::make_pair(x, probe[p]);
    };
    if (a == 0) {
      const double f = probe[0];
      QuadRule pt;
      pt.points = box.lo;
      pt.weights = Eigen::VectorXd::Ones(1);
      out.side[f < 0.0 ? 0 : 1].append(pt);
      return;
    }
    // Kuhn decomposition: one simplex per permutation of the active axes
    std::vector<int> perm(a);
    std::iota(perm.begin(), perm.end(), 0);
    double leaf_measure = 1.0;
    for (int d : active) leaf_measure *= box.hi[d] - box.lo[d];
    const double tiny = 1e-14 * leaf_measure;
    Pieces pieces;
    do {
      Eigen::MatrixXd v(D, a + 1);
      Eigen::VectorXd f(a + 1);
      int mask = 0;
      for (int i = 0; i <= a; ++i) {
        if (i > 0) mask |= 1 << perm[i - 1];
        auto [x, val] = corner(mask);
        v.col(i) = x;
        f[i] = val;
      }
      clip_simplex(v, f, pieces);
    } while (std::next_permutation(perm.begin(), perm.end()));

    for (int s = 0; s < 2; ++s)
      for (const auto& simplex : pieces.side[s])
        if (simplex_measure(simplex) > tiny) out.side[s].append(simplex_rule(simplex, order_));
    if (!want_iface_) return;
    for (const auto& patch : pieces.iface) {
      QuadRule r;
      if (patch.cols() == 1) {
        r.points = patch;
        r.weights = Eigen::VectorXd::Ones(1);
      } else {
        if (simplex_measure(patch) <= 1e-14 * std::pow(leaf_measure, (a - 1.0) / a)) continue;
        r = simplex_rule(patch, iface_order_);
      }
      r.normals.resize(D, r.size());
      for (Eigen::Index q = 0; q < r.size(); ++q) r.normals.col(q) = phi_.normal(r.points.col(q));
      out.iface.append(r);
    }
  }

  const LevelSet& phi_;
  Box root_;
  int max_depth_;
  int order_;
  int iface_order_;
  bool want_iface_;
};

// Replaces `rule` on `cell` by weights on a tensor Gauss grid that match all
// moments of total degree <= order. The grid's discrete inner product is exact
// for these polynomials, so the weights follow in closed form.
QuadRule moment_fit(const Box& cell, const QuadRule& rule, int order) {
  const ReferenceBasis basis(order, cell.dim());
  const Eigen::VectorXd moments = basis.moments(cell, rule.points, rule.weights);
  QuadRule grid = tensor_rule(cell, 2 * order + 1);
  Eigen::MatrixXd nodes;
  basis.eval(cell, grid.points, nodes);
  grid.weights = grid.weights.cwiseProduct(nodes * moments);
  return grid;
}

}  // namespace

CutCellMesh::CutCellMesh(BackgroundMesh mesh, LevelSet phi, CutCellOptions options)
    : mesh_(std::move(mesh)), phi_(std::move(phi)), options_(options) {
  if (options_.gauss_order < 1) throw Error(ErrorKind::InvalidConfig, "gauss_order must be >= 1");
  if (options_.quad_depth < 0) throw Error(ErrorKind::InvalidConfig, "quad_depth must be >= 0");
  cells_.resize(mesh_.num_cells());
  for (int j = 0; j < mesh_.num_cells(); ++j) build_cell(j);
  faces_.resize(mesh_.faces().size());
  for (int f = 0; f < static_cast<int>(faces_.size()); ++f) build_face(f);
}

void CutCellMesh::build_cell(int j) {
  const Box box = mesh_.cell_box(j);
  const int D = mesh_.dim();
  CellData& cell = cells_[j];

  // classification probes: Gauss points of order gauss_order+2 plus corners
  Eigen::VectorXd g, gw;
  gauss_jacobi_01(options_.gauss_order + 2, 0, g, gw);
  std::vector<double> axis_pts{0.0};
  axis_pts.insert(axis_pts.end(), g.data(), g.data() + g.size());
  axis_pts.push_back(1.0);
  const int m = static_cast<int>(axis_pts.size());
  int total = 1;
  for (int d = 0; d < D; ++d) total *= m;
  bool has_neg = false, has_pos = false;
  Eigen::VectorXd x(D);
  for (int p = 0; p < total; ++p) {
    int rem = p;
    for (int d = 0; d < D; ++d) {
      x[d] = box.lo[d] + axis_pts[rem % m] * (box.hi[d] - box.lo[d]);
      rem /= m;
    }
    const double v = phi_(x);
    has_neg |= v < -kZero;
    has_pos |= v > kZero;
  }
  if (!has_neg && !has_pos)
    throw Error(ErrorKind::DegenerateLevelSet,
                "level-set vanishes on all probe points of cell " + std::to_string(j));

  const double cell_volume = mesh_.cell_volume();
  auto make_pure = [&](int s) {
    cell.rules[s] = tensor_rule(box, options_.gauss_order);
    cell.rules[1 - s] = QuadRule(D);
    cell.volume[s] = cell_volume;
    cell.volume[1 - s] = 0.0;
    cell.interface = QuadRule(D);
  };
  if (!(has_neg && has_pos)) {
    make_pure(has_neg ? 0 : 1);
    return;
  }

  Collector col;
  // the fitted rules only reproduce moments up to fit_order
  const int volume_order = options_.fit_order >= 0 ? options_.fit_order : options_.gauss_order;
  BoxIntegrator(phi_, options_.quad_depth, volume_order, true, options_.gauss_order).run(box, col);
  for (int s = 0; s < 2; ++s) {
    cell.volume[s] = col.side[s].measure();
    if (cell.volume[s] <= 1e-14 * cell_volume) {
      make_pure(1 - s);
      return;
    }
  }
  for (int s = 0; s < 2; ++s)
    cell.rules[s] = options_.fit_order >= 0 ? moment_fit(box, col.side[s], options_.fit_order)
                                            : std::move(col.side[s]);
  cell.interface = std::move(col.iface);
  if (cell.interface.empty()) cell.interface = QuadRule(D);
}

void CutCellMesh::build_face(int fi) {
  const Face& face = mesh_.faces()[fi];
  const Box box = mesh_.face_box(face);
  auto& patches = faces_[fi];
  auto single = [&](int j) { return present(j, Species::A) ? Species::A : Species::B; };

  const bool in_cut = is_cut(face.in);
  const bool out_cut = !face.boundary() && is_cut(face.out);
  if (!in_cut && !out_cut) {
    const Species si = single(face.in);
    const Species so = face.boundary() ? si : single(face.out);
    patches.push_back(FacePatch{si, so, tensor_rule(box, options_.gauss_order)});
    return;
  }
  Collector col;
  BoxIntegrator(phi_, options_.quad_depth, options_.gauss_order, false).run(box, col);
  for (Species s : kSpecies) {
    QuadRule& r = col.side[index(s)];
    if (r.empty() || !(r.measure() > 0.0)) continue;
    const bool pin = present(face.in, s);
    const bool pout = face.boundary() || present(face.out, s);
    if (!pin && !pout) continue;
    const Species si = pin ? s : single(face.in);
    const Species so = face.boundary() ? si : (pout ? s : single(face.out));
    patches.push_back(FacePatch{si, so, std::move(r)});
  }
}

const QuadRule& CutCellMesh::quad_volume(int j, Species s) const {
  if (!present(j, s))
    throw Error(ErrorKind::MissingSpecies,
                std::string("species ") + name(s) + " is absent in cell " + std::to_string(j));
  return cells_[j].rules[index(s)];
}

const QuadRule& CutCellMesh::quad_interface(int j) const {
  if (!is_cut(j)) throw Error(ErrorKind::MissingInterface, "cell " + std::to_string(j) + " is not cut");
  return cells_[j].interface;
}

QuadRule CutCellMesh::quad_cut_face(int fi, Species s) const {
  const Face& face = mesh_.faces()[fi];
  if (!present(face.in, s) && (face.boundary() || !present(face.out, s)))
    throw Error(ErrorKind::MissingSpecies,
                std::string("species ") + name(s) + " is absent on both sides of face " + std::to_string(fi));
  QuadRule r(dim());
  for (const auto& p : faces_[fi])
    if (p.in_species == s) r.append(p.rule);
  return r;
}

double CutCellMesh::face_measure(int fi, int j, Species s) const {
  const Face& face = mesh_.faces()[fi];
  double m = 0.0;
  for (const auto& p : faces_[fi]) {
    if ((face.in == j && p.in_species == s) || (face.out == j && p.out_species == s)) m += p.rule.measure();
  }
  return m;
}

int CutCellMesh::num_cut_cells() const {
  int n = 0;
  for (int j = 0; j < num_cells(); ++j)
    for (Species s : kSpecies) n += present(j, s) ? 1 : 0;
  return n;
}

CutCellMesh classify_and_build(const BackgroundMesh& mesh, const LevelSet& phi, int quad_depth,
                               int gauss_order, int fit_order) {
  return CutCellMesh(mesh, phi, CutCellOptions{quad_depth, gauss_order, fit_order});
}

}  // namespace xdg
