#include "xdg/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "xdg/error.hpp"

namespace xdg {

void write_matrix_market(const std::string& path, const Eigen::SparseMatrix<double>& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  out.precision(17);
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
  if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

void write_matrix_market(const std::string& path, const Eigen::VectorXd& v) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i] << '\n';
  if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

Eigen::SparseMatrix<double> read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Io, "empty file '" + path + "'");
  std::string lower = line;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower.rfind("%%matrixmarket matrix coordinate", 0) != 0)
    throw Error(ErrorKind::Io, "'" + path + "' is not a MatrixMarket coordinate file");
  const bool symmetric = lower.find("symmetric") != std::string::npos;
  const bool pattern = lower.find("pattern") != std::string::npos;
  while (std::getline(in, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream header(line);
  long rows = 0, cols = 0, nnz = 0;
  if (!(header >> rows >> cols >> nnz)) throw Error(ErrorKind::Io, "bad size line in '" + path + "'");
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(symmetric ? 2 * nnz : nnz);
  for (long k = 0; k < nnz; ++k) {
    long i = 0, j = 0;
    double v = 1.0;
    if (!(in >> i >> j)) throw Error(ErrorKind::Io, "truncated entry list in '" + path + "'");
    if (!pattern && !(in >> v)) throw Error(ErrorKind::Io, "truncated entry list in '" + path + "'");
    if (i < 1 || j < 1 || i > rows || j > cols) throw Error(ErrorKind::Io, "entry index out of range");
    t.emplace_back(i - 1, j - 1, v);
    if (symmetric && i != j) t.emplace_back(j - 1, i - 1, v);
  }
  Eigen::SparseMatrix<double> m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace xdg
