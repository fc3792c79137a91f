#include "xdg/direct.hpp"

#include <string>

#include <Eigen/LU>
#include <Eigen/SparseLU>

#include "xdg/error.hpp"

namespace xdg {

struct DirectSolver::Dense {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

struct DirectSolver::Sparse {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

DirectSolver::DirectSolver(const Eigen::SparseMatrix<double>& m, Eigen::Index dense_limit) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "direct solver needs a square matrix");
  if (m.rows() <= dense_limit) {
    factor_dense(Eigen::MatrixXd(m));
    return;
  }
  n_ = m.rows();
  sparse_ = std::make_shared<Sparse>();
  Eigen::SparseMatrix<double> c = m;
  c.makeCompressed();
  sparse_->lu.compute(c);
  ++counter_;
  if (sparse_->lu.info() != Eigen::Success)
    throw Error(ErrorKind::SingularSystem, "sparse LU failed: " + sparse_->lu.lastErrorMessage());
}

DirectSolver::DirectSolver(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "direct solver needs a square matrix");
  factor_dense(m);
}

void DirectSolver::factor_dense(const Eigen::MatrixXd& m) {
  n_ = m.rows();
  if (n_ == 0) return;
  dense_ = std::make_shared<Dense>();
  dense_->lu.compute(m);
  ++counter_;
  const Eigen::VectorXd u = dense_->lu.matrixLU().diagonal().cwiseAbs();
  if (!(u.minCoeff() > 1e-15 * u.maxCoeff()))
    throw Error(ErrorKind::SingularSystem,
                "matrix of size " + std::to_string(n_) + " is numerically singular");
}

Eigen::VectorXd DirectSolver::solve(const Eigen::VectorXd& b) const {
  if (b.size() != n_) throw Error(ErrorKind::DimensionMismatch, "right-hand side length does not match");
  if (n_ == 0) return b;
  if (dense_) return dense_->lu.solve(b);
  return sparse_->lu.solve(b);
}

DirectSolver direct_factor(const BlockSparseMatrix<double>& m) { return DirectSolver(m.to_sparse()); }

Eigen::VectorXd direct_apply(const DirectSolver& f, const Eigen::VectorXd& b) { return f.solve(b); }

}  // namespace xdg
