#include "xdg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "xdg/levelset.hpp"
#include "xdg/mesh.hpp"

namespace xdg {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  int out = 0;
  try {
    out = std::stoi(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw Error(ErrorKind::InvalidConfig, key + ": expected an integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw Error(ErrorKind::InvalidConfig, key + ": expected a number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw Error(ErrorKind::InvalidConfig, key + ": expected a boolean, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

BenchCase BenchCase::resolved() const {
  BenchCase c = *this;
  if (c.dim < 1 || c.dim > 3) throw Error(ErrorKind::InvalidConfig, "dim must be 1, 2 or 3");
  if (c.cells < 1) throw Error(ErrorKind::InvalidConfig, "cells per axis must be >= 1");
  if (c.degree < 0) throw Error(ErrorKind::InvalidConfig, "degree must be >= 0");
  if (!(c.mu_a > 0.0) || !(c.mu_b > 0.0)) throw Error(ErrorKind::InvalidConfig, "diffusion coefficients must be positive");
  if (c.quad_depth < 0) throw Error(ErrorKind::InvalidConfig, "quad-depth must be >= 0");
  if (!(c.c_eta > 0.0)) throw Error(ErrorKind::InvalidConfig, "penalty factor must be positive");
  if (c.solver != "direct" && c.solver != "omg" && c.solver != "gmres-pmg")
    throw Error(ErrorKind::InvalidConfig, "unknown solver '" + c.solver + "' (direct, omg, gmres-pmg)");
  if (c.exact != "none" && c.exact != "sphere") throw Error(ErrorKind::InvalidConfig, "unknown exact solution '" + c.exact + "'");
  if (c.exact == "sphere" && c.levelset != "sphere")
    throw Error(ErrorKind::InvalidConfig, "the sphere exact solution needs the sphere level set");
  if (!c.alpha) c.alpha = c.degree >= 5 ? 0.3 : 0.1;
  if (!c.k_lo) c.k_lo = c.degree >= 5 ? 3 : std::min(1, c.degree);
  if (!c.gauss_order) c.gauss_order = 2 * c.degree + 2;
  if (!c.fit_order) c.fit_order = c.dim == 3 ? 2 * c.degree : -1;
  if (*c.gauss_order < 1) throw Error(ErrorKind::InvalidConfig, "gauss-order must be >= 1");
  c.solver_config.k_lo = *c.k_lo;
  c.solver_config.validate(c.degree);
  return c;
}

void apply_setting(BenchCase& c, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "dim") c.dim = to_int(key, v);
  else if (key == "cells") c.cells = to_int(key, v);
  else if (key == "degree") c.degree = to_int(key, v);
  else if (key == "mu-a") c.mu_a = to_double(key, v);
  else if (key == "mu-b") c.mu_b = to_double(key, v);
  else if (key == "alpha") c.alpha = to_double(key, v);
  else if (key == "levelset") c.levelset = v;
  else if (key == "levelset-params") c.levelset_params = to_doubles(key, v);
  else if (key == "exact") c.exact = v;
  else if (key == "solver") c.solver = v;
  else if (key == "tol") c.solver_config.tol = to_double(key, v);
  else if (key == "klo") c.k_lo = to_int(key, v);
  else if (key == "levels") c.solver_config.levels = to_int(key, v);
  else if (key == "max-iter") c.solver_config.max_iter = to_int(key, v);
  else if (key == "schwarz-block-dofs") c.solver_config.schwarz_block_dofs = to_int(key, v);
  else if (key == "gmres-restart") c.solver_config.gmres_restart = to_int(key, v);
  else if (key == "rm-max-columns") c.solver_config.rm_max_columns = to_int(key, v);
  else if (key == "coarse-cycles") c.solver_config.coarse_cycles = to_int(key, v);
  else if (key == "pmg-high-from-rhs") c.solver_config.pmg_high_from_rhs = to_bool(key, v);
  else if (key == "pmg-cell-all-modes") c.solver_config.pmg_cell_all_modes = to_bool(key, v);
  else if (key == "smoother-from-rhs") c.solver_config.smoother_from_rhs = to_bool(key, v);
  else if (key == "quad-depth") c.quad_depth = to_int(key, v);
  else if (key == "gauss-order") c.gauss_order = to_int(key, v);
  else if (key == "fit-order") c.fit_order = to_int(key, v);
  else if (key == "c-eta") c.c_eta = to_double(key, v);
  else if (key == "out") c.out = v;
  else throw Error(ErrorKind::InvalidConfig, "unknown configuration key '" + key + "'");
}

void load_config_file(BenchCase& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::InvalidConfig, path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_setting(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

CaseSetup setup_case(const BenchCase& input, std::optional<int> levels) {
  CaseSetup s;
  s.config = input.resolved();
  const BenchCase& c = s.config;

  auto t0 = Clock::now();
  const BackgroundMesh mesh = build_cartesian(-1.0, 1.0, c.cells, c.dim);
  const LevelSet phi = levelsets::by_name(c.levelset, c.levelset_params, c.dim);
  s.cutmesh = std::make_unique<CutCellMesh>(classify_and_build(mesh, phi, c.quad_depth, *c.gauss_order, *c.fit_order));
  s.cutcell_ms = ms_since(t0);

  s.basis = std::make_unique<ReferenceBasis>(c.degree, c.dim);
  s.map = std::make_unique<XdgIndexMap>(*s.cutmesh, std::vector<int>{c.degree});
  s.mass = std::make_unique<SpeciesMass>(*s.cutmesh, *s.basis);
  s.small_cells = small_cell_agglomeration_map(*s.cutmesh, *c.alpha);

  s.problem.mu_a = c.mu_a;
  s.problem.mu_b = c.mu_b;
  if (c.exact == "sphere") {
    Eigen::VectorXd center = Eigen::VectorXd::Zero(c.dim);
    double radius = c.levelset_params.empty() ? 0.7 : c.levelset_params.back();
    if (c.levelset_params.size() == static_cast<std::size_t>(c.dim) + 1)
      for (int d = 0; d < c.dim; ++d) center[d] = c.levelset_params[d];
    const double mu_a = c.mu_a, mu_b = c.mu_b;
    s.exact = [center, radius, mu_a, mu_b](const Eigen::VectorXd& x, Species sp) {
      return ((x - center).squaredNorm() - radius * radius) / (sp == Species::A ? mu_a : mu_b);
    };
    const double f = -2.0 * c.dim;
    s.problem.source = [f](const Eigen::VectorXd&, Species) { return f; };
    s.problem.dirichlet = s.exact;
  }

  t0 = Clock::now();
  const PenaltyScales scales(*s.cutmesh, cut_aggregates(*s.cutmesh, s.small_cells));
  const PenaltyConfig penalty{c.c_eta};
  s.M0 = assemble_sip(*s.cutmesh, *s.map, *s.basis, s.problem, scales, penalty);
  s.b0 = assemble_rhs(*s.cutmesh, *s.map, *s.basis, s.problem, scales, penalty);
  s.assembly_ms = ms_since(t0);

  const int nlev = levels ? *levels : (c.solver == "omg" ? c.solver_config.levels : 1);
  s.hierarchy = build_hierarchy(*s.cutmesh, *s.basis, *s.mass, *s.map, s.M0, s.b0, s.small_cells, nlev);
  return s;
}

CaseResult solve_setup(const CaseSetup& s) {
  const BenchCase& c = s.config;
  const MultigridLevel& fine = s.hierarchy.finest();
  CaseResult out;
  out.dofs = s.map->size();
  out.dofs_agglomerated = fine.size();
  std::pair<Eigen::VectorXd, SolverReport> res;
  if (c.solver == "direct") {
    res = direct_solve(fine.M, fine.b);
  } else if (c.solver == "omg") {
    res = ortho_mg_solve(s.hierarchy, fine.b, Eigen::VectorXd::Zero(fine.size()), c.solver_config);
  } else {
    const int low = basis_dimension(c.solver_config.k_lo, c.dim);
    const auto t0 = Clock::now();
    const PmgSolver pmg(fine.M, cell_groups(*fine.space), low,
                        PmgVariant{c.solver_config.pmg_high_from_rhs, c.solver_config.pmg_cell_all_modes});
    const double pmg_ms = ms_since(t0);
    res = gmres_pmg_solve(fine.M, fine.b, c.solver_config, pmg);
    res.second.solve_ms += pmg_ms;
  }
  out.solution = std::move(res.first);
  out.report = std::move(res.second);
  out.report.setup_basis_ms = s.hierarchy.basis_ms;
  out.report.setup_matmat_ms = s.hierarchy.matmat_ms;
  out.l2_error = std::numeric_limits<double>::quiet_NaN();
  if (s.exact) {
    const Eigen::VectorXd u = bs_matvec(s.hierarchy.P, out.solution);
    out.l2_error = l2_error(u, s.exact, *s.cutmesh, *s.map, *s.basis);
  }
  return out;
}

CaseResult run_case(const BenchCase& c) { return solve_setup(setup_case(c)); }

std::string sweep_csv_header() {
  return "grid,k,dofs,solver,iterations,converged,setup_basis_ms,setup_matmat_ms,solve_ms,final_residual,l2_error,"
         "dofs_agglomerated,error";
}

std::string run_sweep(const BenchCase& base, const std::vector<int>& grids, const std::vector<int>& degrees,
                      const std::vector<std::string>& solvers) {
  if (grids.empty() || degrees.empty() || solvers.empty())
    throw Error(ErrorKind::InvalidConfig, "sweep needs nonempty grid, degree and solver lists");
  std::ostringstream out;
  out << sweep_csv_header() << '\n';
  for (int g : grids)
    for (int k : degrees)
      for (const std::string& solver : solvers) {
        BenchCase c = base;
        c.cells = g;
        c.degree = k;
        c.solver = solver;
        out << g << ',' << k << ',';
        try {
          const CaseResult r = run_case(c);
          std::ostringstream row;
          row << r.dofs << ',' << solver << ',' << r.report.iterations << ',' << (r.report.converged ? 1 : 0) << ','
              << r.report.setup_basis_ms << ',' << r.report.setup_matmat_ms << ',' << r.report.solve_ms << ',';
          row.precision(6);
          row << std::scientific << r.report.final_residual << ',';
          if (!std::isnan(r.l2_error)) row << r.l2_error;
          row << std::defaultfloat << ',' << r.dofs_agglomerated << ',';
          out << row.str() << '\n';
        } catch (const std::exception& e) {
          std::string msg = e.what();
          std::replace(msg.begin(), msg.end(), ',', ';');
          std::replace(msg.begin(), msg.end(), '\n', ' ');
          out << ',' << solver << ",,0,,,,,,," << msg << '\n';
        }
      }
  return out.str();
}

std::string micro_bench_matops(const BenchCase& c, int repetitions) {
  if (repetitions < 1) throw Error(ErrorKind::InvalidConfig, "repetitions must be >= 1");
  const CaseSetup s = setup_case(c, 1);
  const BlockSparseMatrix<double>& M = s.hierarchy.finest().M;
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(M.cols());
  // each timed sample averages enough matvecs to last about 25 ms
  volatile double sink = 0.0;
  int batch = 1;
  for (;;) {
    const auto t0 = Clock::now();
    for (int b = 0; b < batch; ++b) sink = sink + bs_matvec(M, x)[0];
    if (ms_since(t0) >= 25.0 || batch >= (1 << 20)) break;
    batch *= 2;
  }
  std::vector<double> mv;
  for (int i = 0; i < repetitions; ++i) {
    const auto t0 = Clock::now();
    for (int b = 0; b < batch; ++b) sink = sink + bs_matvec(M, x)[0];
    mv.push_back(ms_since(t0) / batch);
  }
  const BlockSparseMatrix<double> Mt = bs_transpose(M);
  auto t0 = Clock::now();
  const BlockSparseMatrix<double> MM = bs_matmat(M, Mt);
  const double mm = ms_since(t0);
  sink = sink + MM.num_blocks();
  std::ostringstream out;
  out << "operation,repetitions,median_ms,nonzero_rows,nonzeros,dofs\n";
  out << "matvec," << repetitions << ',' << median(mv) << ',' << M.nonzero_rows() << ',' << M.nonzeros() << ','
      << M.rows() << '\n';
  out << "matmat,1," << mm << ',' << M.nonzero_rows() << ',' << M.nonzeros() << ',' << M.rows() << '\n';
  return out.str();
}

}  // namespace xdg
