#include "xdg/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "xdg/basis.hpp"

namespace xdg {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::SparseMatrix<double> submatrix(const Eigen::SparseMatrix<double>& A, const std::vector<int>& idx) {
  std::vector<int> pos(A.rows(), -1);
  for (std::size_t i = 0; i < idx.size(); ++i) pos[idx[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t c = 0; c < idx.size(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, idx[c]); it; ++it)
      if (pos[it.row()] >= 0) t.emplace_back(pos[it.row()], static_cast<int>(c), it.value());
  Eigen::SparseMatrix<double> s(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

}  // namespace

void SolverConfig::validate(int degree) const {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidConfig, "tolerance must be positive");
  if (k_lo < 0 || k_lo > degree) throw Error(ErrorKind::InvalidConfig, "k_lo must lie in [0, k]");
  if (max_iter < 0) throw Error(ErrorKind::InvalidConfig, "max iterations must be >= 0");
  if (gmres_restart < 1) throw Error(ErrorKind::InvalidConfig, "GMRES restart must be >= 1");
  if (levels < 1) throw Error(ErrorKind::InvalidConfig, "number of multigrid levels must be >= 1");
  if (schwarz_block_dofs < 1) throw Error(ErrorKind::InvalidConfig, "Schwarz block size must be >= 1");
  if (rm_max_columns < 3) throw Error(ErrorKind::InvalidConfig, "residual minimization needs >= 3 columns");
  if (coarse_cycles < 1) throw Error(ErrorKind::InvalidConfig, "coarse cycles must be >= 1");
}

std::string solver_report_csv_header() {
  return "solver,iterations,converged,final_residual,setup_basis_ms,setup_matmat_ms,solve_ms";
}

std::string solver_report_csv_row(const SolverReport& r) {
  std::ostringstream out;
  out.precision(6);
  out << r.solver << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << std::scientific
      << r.final_residual << std::defaultfloat << ',' << r.setup_basis_ms << ',' << r.setup_matmat_ms << ','
      << r.solve_ms;
  return out.str();
}

std::string residual_history_csv(const SolverReport& r) {
  std::ostringstream out;
  out << "iteration,residual\n";
  out.precision(17);
  for (std::size_t i = 0; i < r.history.size(); ++i) out << i << ',' << r.history[i] << '\n';
  return out.str();
}

PmgSolver::PmgSolver(const BlockSparseMatrix<double>& M, std::vector<std::vector<int>> cells, int low_modes,
                     PmgVariant variant)
    : variant_(variant) {
  std::vector<int> offset;
  int n = 0;
  for (const auto& c : cells)
    for (int b : c) {
      blocks_.push_back(b);
      offset.push_back(n);
      n += M.row_size(b);
    }
  A_ = bs_extract(M, blocks_);
  std::size_t k = 0;
  for (const auto& c : cells) {
    std::vector<int> hi;
    for (std::size_t i = 0; i < c.size(); ++i, ++k) {
      const int size = M.row_size(blocks_[k]);
      for (int m = 0; m < size; ++m) {
        if (m < low_modes) low_.push_back(offset[k] + m);
        if (m >= low_modes || variant_.cell_all_modes) hi.push_back(offset[k] + m);
      }
    }
    if (!hi.empty()) high_.push_back(std::move(hi));
  }
  if (!low_.empty()) {
    try {
      low_solver_ = DirectSolver(submatrix(A_, low_));
    } catch (const Error& e) {
      throw Error(ErrorKind::SingularSystem, std::string("p-multigrid low-order system: ") + e.what());
    }
  }
  for (std::size_t g = 0; g < high_.size(); ++g) {
    try {
      high_solvers_.emplace_back(Eigen::MatrixXd(submatrix(A_, high_[g])));
    } catch (const Error& e) {
      throw Error(ErrorKind::SingularSystem,
                  "p-multigrid high-order block of cell group " + std::to_string(g) + ": " + e.what());
    }
  }
}

Eigen::VectorXd PmgSolver::apply(const Eigen::VectorXd& b) const {
  if (b.size() != A_.rows()) throw Error(ErrorKind::DimensionMismatch, "p-multigrid: vector length mismatch");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  if (!low_.empty()) {
    const Eigen::VectorXd xl = low_solver_.solve(gather(b, low_));
    for (std::size_t i = 0; i < low_.size(); ++i) x[low_[i]] = xl[i];
  }
  if (high_.empty()) return x;
  const Eigen::VectorXd r = variant_.high_from_rhs || low_.empty() ? b : Eigen::VectorXd(b - A_ * x);
  for (std::size_t g = 0; g < high_.size(); ++g) {
    const Eigen::VectorXd xh = high_solvers_[g].solve(gather(r, high_[g]));
    for (std::size_t i = 0; i < high_[g].size(); ++i) x[high_[g][i]] += xh[i];
  }
  return x;
}

Eigen::VectorXd pmg_apply(const PmgSolver& pmg, const Eigen::VectorXd& b) { return pmg.apply(b); }

std::vector<std::vector<int>> cell_groups(const AggregatedSpace& space) {
  std::vector<std::vector<int>> groups;
  int last = -1;
  for (int a = 0; a < space.num_aggregates(); ++a) {
    const int rep = space.aggregate(a).representative();
    if (rep != last) groups.emplace_back();
    groups.back().push_back(a);
    last = rep;
  }
  return groups;
}

std::vector<std::vector<int>> cell_groups(const XdgIndexMap& map) {
  std::vector<std::vector<int>> groups;
  for (int j = 0; j < map.num_cells(); ++j) {
    auto e = map.entries_of_cell(j);
    if (!e.empty()) groups.push_back(std::move(e));
  }
  return groups;
}

MeshGraph group_graph(const BlockSparseMatrix<double>& M, const std::vector<std::vector<int>>& groups) {
  std::vector<int> group_of(M.num_block_rows(), -1);
  for (int g = 0; g < static_cast<int>(groups.size()); ++g)
    for (int b : groups[g]) group_of[b] = g;
  std::set<Edge> edges;
  for (int i = 0; i < M.num_block_rows(); ++i)
    for (const auto& [j, blk] : M.row(i)) {
      const int gi = group_of[i], gj = group_of[j];
      if (gi >= 0 && gj >= 0 && gi != gj) edges.insert({std::min(gi, gj), std::max(gi, gj)});
    }
  MeshGraph g;
  g.num_nodes = static_cast<int>(groups.size());
  g.edges.assign(edges.begin(), edges.end());
  g.neighbors.resize(g.num_nodes);
  for (const auto& [a, b] : g.edges) {
    g.neighbors[a].push_back(b);
    g.neighbors[b].push_back(a);
  }
  for (auto& n : g.neighbors) std::sort(n.begin(), n.end());
  return g;
}

SchwarzPartition schwarz_partition(const MeshGraph& graph, const std::vector<int>& node_dofs, int target_dofs) {
  const int n = graph.num_nodes;
  std::vector<int> assign(n, -1);
  std::vector<std::vector<int>> blocks;
  std::vector<long> block_dofs;
  for (int seed = 0; seed < n; ++seed) {
    if (assign[seed] >= 0) continue;
    const int id = static_cast<int>(blocks.size());
    std::vector<int> block;
    std::deque<int> queue{seed};
    assign[seed] = id;
    long dofs = 0, queued = node_dofs[seed];
    while (!queue.empty() && dofs < target_dofs) {
      const int c = queue.front();
      queue.pop_front();
      queued -= node_dofs[c];
      block.push_back(c);
      dofs += node_dofs[c];
      for (int m : graph.neighbors[c]) {
        if (assign[m] >= 0 || dofs + queued >= target_dofs) continue;
        assign[m] = id;
        queue.push_back(m);
        queued += node_dofs[m];
      }
    }
    for (int c : queue) assign[c] = -1;
    std::sort(block.begin(), block.end());
    blocks.push_back(std::move(block));
    block_dofs.push_back(dofs);
  }

  // merge blocks below half the target into their smallest neighbouring block
  for (bool merged = true; merged;) {
    merged = false;
    for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
      if (blocks[b].empty() || 2 * block_dofs[b] >= target_dofs) continue;
      int best = -1;
      for (int c : blocks[b])
        for (int m : graph.neighbors[c]) {
          const int o = assign[m];
          if (o != b && (best < 0 || block_dofs[o] < block_dofs[best] || (block_dofs[o] == block_dofs[best] && o < best)))
            best = o;
        }
      if (best < 0) continue;
      for (int c : blocks[b]) assign[c] = best;
      blocks[best].insert(blocks[best].end(), blocks[b].begin(), blocks[b].end());
      std::sort(blocks[best].begin(), blocks[best].end());
      block_dofs[best] += block_dofs[b];
      blocks[b].clear();
      block_dofs[b] = 0;
      merged = true;
    }
  }

  SchwarzPartition p;
  for (auto& b : blocks)
    if (!b.empty()) p.blocks.push_back(std::move(b));
  p.damping.assign(n, 0);
  for (const auto& b : p.blocks) {
    std::set<int> ext(b.begin(), b.end());
    for (int c : b) ext.insert(graph.neighbors[c].begin(), graph.neighbors[c].end());
    p.extended.emplace_back(ext.begin(), ext.end());
    for (int c : ext) ++p.damping[c];
  }
  return p;
}

SchwarzPartition schwarz_partition(const MeshGraph& graph, const XdgIndexMap& map, int target_dofs) {
  std::vector<int> dofs(graph.num_nodes, 0);
  for (int j = 0; j < graph.num_nodes && j < map.num_cells(); ++j)
    dofs[j] = static_cast<int>(map.entries_of_cell(j).size()) * map.entry_size();
  return schwarz_partition(graph, dofs, target_dofs);
}

SchwarzSmoother::SchwarzSmoother(const BlockSparseMatrix<double>& M, const std::vector<std::vector<int>>& groups,
                                 const SchwarzPartition& partition, int low_modes, PmgVariant variant) {
  for (int b = 0; b < M.num_block_rows(); ++b) {
    offsets_.push_back(static_cast<int>(M.row_offset(b)));
    sizes_.push_back(M.row_size(b));
  }
  damping_ = Eigen::VectorXd::Zero(M.rows());
  for (std::size_t i = 0; i < partition.extended.size(); ++i) {
    std::vector<std::vector<int>> cells;
    for (int node : partition.extended[i]) cells.push_back(groups[node]);
    solvers_.emplace_back(M, std::move(cells), low_modes, variant);
    for (int b : solvers_.back().blocks()) damping_.segment(offsets_[b], sizes_[b]).array() += 1.0;
  }
  if (damping_.size() > 0 && damping_.minCoeff() < 1.0)
    throw Error(ErrorKind::InvalidInput, "Schwarz partition does not cover every block");
}

Eigen::VectorXd SchwarzSmoother::apply_unscaled(const Eigen::VectorXd& r) const {
  if (r.size() != damping_.size()) throw Error(ErrorKind::DimensionMismatch, "Schwarz: vector length mismatch");
  Eigen::VectorXd z = Eigen::VectorXd::Zero(r.size());
  for (const PmgSolver& s : solvers_) {
    Eigen::VectorXd local(s.size());
    int k = 0;
    for (int b : s.blocks()) {
      local.segment(k, sizes_[b]) = r.segment(offsets_[b], sizes_[b]);
      k += sizes_[b];
    }
    const Eigen::VectorXd x = s.apply(local);
    k = 0;
    for (int b : s.blocks()) {
      z.segment(offsets_[b], sizes_[b]) += x.segment(k, sizes_[b]);
      k += sizes_[b];
    }
  }
  return z;
}

Eigen::VectorXd SchwarzSmoother::apply(const Eigen::VectorXd& r) const {
  return apply_unscaled(r).cwiseQuotient(damping_);
}

Eigen::VectorXd schwarz_apply(const SchwarzSmoother& smoother, const Eigen::VectorXd& r) { return smoother.apply(r); }

RmState::RmState(Eigen::VectorXd x0, Eigen::VectorXd r0, int max_columns)
    : x0_(std::move(x0)), r0_(std::move(r0)), max_columns_(max_columns) {
  if (x0_.size() != r0_.size()) throw Error(ErrorKind::DimensionMismatch, "x0 and r0 differ in length");
  x_ = x0_;
  r_ = r0_;
}

Eigen::MatrixXd RmState::W() const {
  Eigen::MatrixXd m(r_.size(), columns());
  for (int i = 0; i < columns(); ++i) m.col(i) = W_[i];
  return m;
}

Eigen::MatrixXd RmState::Z() const {
  Eigen::MatrixXd m(r_.size(), columns());
  for (int i = 0; i < columns(); ++i) m.col(i) = Z_[i];
  return m;
}

void RmState::restart(const Eigen::VectorXd& r) {
  x0_ = x_;
  r0_ = r;
  r_ = r;
  alpha_.resize(0);
  W_.clear();
  Z_.clear();
}

RmResult rm_step(RmState& st, const Eigen::VectorXd& z, const BlockSparseMatrix<double>& M) {
  if (z.size() != st.r_.size()) throw Error(ErrorKind::DimensionMismatch, "candidate length mismatch");
  Eigen::VectorXd w = bs_matvec(M, z);
  const double w0 = w.norm();
  if (!(w0 > 0.0)) return RmResult::Dependent;
  Eigen::VectorXd zz = z;
  auto orthogonalize = [&] {
    for (int i = 0; i < st.columns(); ++i) {
      const double h = st.W_[i].dot(w);
      w -= h * st.W_[i];
      zz -= h * st.Z_[i];
    }
  };
  orthogonalize();
  if (w.norm() < 1e-13 * w0) return RmResult::Dependent;
  // cancellation above leaves w - M zz at rounding level of |M z|; recompute the
  // image from zz and orthogonalize once more so that W = M Z stays accurate
  w = bs_matvec(M, zz);
  orthogonalize();
  const double nw = w.norm();
  if (nw < 1e-13 * w0) return RmResult::Dependent;
  if (st.columns() >= st.max_columns_) {
    st.restart(st.r_);
    return rm_step(st, z, M);
  }
  w /= nw;
  zz /= nw;
  double a = w.dot(st.r_);
  Eigen::VectorXd r = st.r_ - a * w;
  // guard the non-increase property against rounding
  if (r.squaredNorm() > st.r_.squaredNorm()) {
    a = 0.0;
  } else {
    st.r_ = std::move(r);
    st.x_ += a * zz;
  }
  st.W_.push_back(std::move(w));
  st.Z_.push_back(std::move(zz));
  st.alpha_.conservativeResize(st.alpha_.size() + 1);
  st.alpha_[st.alpha_.size() - 1] = a;
  return RmResult::Accepted;
}

OrthoMgSolver::OrthoMgSolver(const MultigridHierarchy& hierarchy, SolverConfig config)
    : h_(hierarchy), cfg_(config) {
  if (h_.levels.empty()) throw Error(ErrorKind::InvalidInput, "empty multigrid hierarchy");
  const AggregatedSpace& fine = *h_.levels[0].space;
  const int dim = fine.bbox(0).dim();
  int degree = 0;
  while (basis_dimension(degree, dim) < fine.entry_size()) ++degree;
  cfg_.validate(degree);
  const int low_modes = basis_dimension(cfg_.k_lo, dim);
  const int L = h_.num_levels();
  for (int l = 0; l + 1 < L; ++l) {
    const auto& lv = h_.levels[l];
    const auto groups = cell_groups(*lv.space);
    std::vector<int> dofs;
    for (const auto& g : groups) dofs.push_back(static_cast<int>(g.size()) * lv.space->entry_size());
    const SchwarzPartition part = schwarz_partition(group_graph(lv.M, groups), dofs, cfg_.schwarz_block_dofs);
    smoothers_.push_back(std::make_unique<SchwarzSmoother>(lv.M, groups, part, low_modes,
                                                         PmgVariant{cfg_.pmg_high_from_rhs, cfg_.pmg_cell_all_modes}));
    Rt_.push_back(bs_transpose(lv.R));
  }
  coarse_ = DirectSolver(h_.levels.back().M.to_sparse());
}

void OrthoMgSolver::iterate(int level, const Eigen::VectorXd& b, RmState& st, int max_iter, double tol,
                            SolverReport* report) const {
  const auto& lv = h_.levels[level];
  const SchwarzSmoother& smoother = *smoothers_[level];
  auto step = [&](const Eigen::VectorXd& z) {
    rm_step(st, z, lv.M);
    if (level == 0 && on_rm_step) on_rm_step(st, lv.M);
  };
  for (int it = 0; it < max_iter; ++it) {
    if (st.r().norm() <= tol) break;
    step(smoother.apply(cfg_.smoother_from_rhs ? b : st.r()));
    const Eigen::VectorXd rc = bs_matvec(Rt_[level], st.r());
    step(bs_matvec(lv.R, cycle(level + 1, rc, cfg_.coarse_cycles)));
    step(smoother.apply(cfg_.smoother_from_rhs ? b : st.r()));
    if (report) {
      ++report->iterations;
      report->history.push_back(st.r().norm());
    }
  }
}

Eigen::VectorXd OrthoMgSolver::cycle(int level, const Eigen::VectorXd& b, int cycles) const {
  if (level + 1 == h_.num_levels()) return coarse_.solve(b);
  RmState st(Eigen::VectorXd::Zero(b.size()), b, cfg_.rm_max_columns);
  iterate(level, b, st, cycles, 0.0, nullptr);
  return st.x();
}

SolverReport OrthoMgSolver::solve(const Eigen::VectorXd& b, Eigen::VectorXd& x, int level) const {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& lv = h_.levels.at(level);
  if (b.size() != lv.size()) throw Error(ErrorKind::DimensionMismatch, "right-hand side length mismatch");
  if (x.size() != b.size()) x = Eigen::VectorXd::Zero(b.size());
  SolverReport report;
  report.solver = "omg";
  report.setup_basis_ms = h_.basis_ms;
  report.setup_matmat_ms = h_.matmat_ms;
  if (level + 1 == h_.num_levels()) {
    x = coarse_.solve(b);
  } else {
    RmState st(x, b - bs_matvec(lv.M, x), cfg_.rm_max_columns);
    report.history.push_back(st.r().norm());
    // the recursively updated residual drifts from b - M x; restart from the true one
    double last = std::numeric_limits<double>::infinity();
    for (;;) {
      iterate(level, b, st, cfg_.max_iter - report.iterations, cfg_.tol, &report);
      const Eigen::VectorXd r = b - bs_matvec(lv.M, st.x());
      const double rn = r.norm();
      if (rn <= cfg_.tol || report.iterations >= cfg_.max_iter || rn >= last) break;
      last = rn;
      st.restart(r);
    }
    x = st.x();
  }
  report.final_residual = (b - bs_matvec(lv.M, x)).norm();
  report.converged = report.final_residual <= cfg_.tol;
  report.solve_ms = ms_since(t0);
  return report;
}

std::pair<Eigen::VectorXd, SolverReport> ortho_mg_solve(const MultigridHierarchy& hierarchy, const Eigen::VectorXd& b,
                                                        const Eigen::VectorXd& x0, const SolverConfig& config,
                                                        int level) {
  const OrthoMgSolver solver(hierarchy, config);
  Eigen::VectorXd x = x0;
  SolverReport r = solver.solve(b, x, level);
  return {x, r};
}

std::pair<Eigen::VectorXd, SolverReport> gmres_pmg_solve(const BlockSparseMatrix<double>& M, const Eigen::VectorXd& b,
                                                         const SolverConfig& config, const PmgSolver& pre) {
  const auto t0 = std::chrono::steady_clock::now();
  if (b.size() != M.rows() || pre.size() != M.rows())
    throw Error(ErrorKind::DimensionMismatch, "GMRES: operand sizes differ");
  if (!(config.tol > 0.0)) throw Error(ErrorKind::InvalidConfig, "tolerance must be positive");
  // the preconditioner works in its own block order
  std::vector<int> perm;
  for (int blk : pre.blocks())
    for (int i = 0; i < M.row_size(blk); ++i) perm.push_back(static_cast<int>(M.row_offset(blk)) + i);
  auto precondition = [&](const Eigen::VectorXd& v) {
    const Eigen::VectorXd y = pre.apply(gather(v, perm));
    Eigen::VectorXd out(v.size());
    for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = y[i];
    return out;
  };

  SolverReport report;
  report.solver = "gmres-pmg";
  const int m = config.gmres_restart;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  double beta = r.norm();
  report.history.push_back(beta);
  while (beta > config.tol && report.iterations < config.max_iter) {
    std::vector<Eigen::VectorXd> V{r / beta}, Zp;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(m), sn = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
    g[0] = beta;
    int used = 0;
    for (int j = 0; j < m && report.iterations < config.max_iter; ++j) {
      Zp.push_back(precondition(V[j]));
      Eigen::VectorXd w = bs_matvec(M, Zp[j]);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = w.dot(V[i]);
        w -= H(i, j) * V[i];
      }
      H(j + 1, j) = w.norm();
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double d = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = d > 0.0 ? H(j, j) / d : 1.0;
      sn[j] = d > 0.0 ? H(j + 1, j) / d : 0.0;
      const double hj1 = H(j + 1, j);
      H(j, j) = cs[j] * H(j, j) + sn[j] * hj1;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      ++report.iterations;
      ++used;
      report.history.push_back(std::abs(g[j + 1]));
      if (std::abs(g[j + 1]) <= config.tol || hj1 == 0.0) break;
      V.push_back(w / hj1);
    }
    const Eigen::VectorXd y =
        H.topLeftCorner(used, used).triangularView<Eigen::Upper>().solve(g.head(used));
    for (int i = 0; i < used; ++i) x += y[i] * Zp[i];
    r = b - bs_matvec(M, x);
    beta = r.norm();
  }
  report.final_residual = beta;
  report.converged = beta <= config.tol;
  report.solve_ms = ms_since(t0);
  return {x, report};
}

std::pair<Eigen::VectorXd, SolverReport> direct_solve(const BlockSparseMatrix<double>& M, const Eigen::VectorXd& b) {
  const auto t0 = std::chrono::steady_clock::now();
  const DirectSolver f = direct_factor(M);
  Eigen::VectorXd x = f.solve(b);
  SolverReport report;
  report.solver = "direct";
  report.final_residual = (b - bs_matvec(M, x)).norm();
  report.history = {b.norm(), report.final_residual};
  report.converged = true;
  report.solve_ms = ms_since(t0);
  return {x, report};
}

}  // namespace xdg
