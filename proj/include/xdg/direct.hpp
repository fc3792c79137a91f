#pragma once

#include <atomic>
#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "xdg/block_sparse.hpp"

namespace xdg {

/// Stored LU factorization: dense with partial pivoting for small systems,
/// sparse (COLAMD-ordered) above `dense_limit` rows. Solves reuse it.
class DirectSolver {
 public:
  static constexpr Eigen::Index kDenseLimit = 800;

  DirectSolver() = default;
  explicit DirectSolver(const Eigen::SparseMatrix<double>& m, Eigen::Index dense_limit = kDenseLimit);
  explicit DirectSolver(const Eigen::MatrixXd& m);

  Eigen::Index size() const { return n_; }
  bool empty() const { return n_ == 0; }
  bool is_dense() const { return static_cast<bool>(dense_); }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  /// Total number of factorizations performed in this process.
  static long factorization_count() { return counter_.load(); }

 private:
  struct Dense;
  struct Sparse;
  void factor_dense(const Eigen::MatrixXd& m);

  Eigen::Index n_ = 0;
  std::shared_ptr<Dense> dense_;
  std::shared_ptr<Sparse> sparse_;
  static inline std::atomic<long> counter_{0};
};

DirectSolver direct_factor(const BlockSparseMatrix<double>& m);
Eigen::VectorXd direct_apply(const DirectSolver& f, const Eigen::VectorXd& b);

}  // namespace xdg
