#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "xdg/error.hpp"

namespace xdg {

/// Sparse matrix of dense blocks. Block rows and columns have individual
/// sizes; inserting into an existing block accumulates.
template <typename Scalar>
class BlockSparseMatrix {
 public:
  using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Row = std::map<int, Block>;

  BlockSparseMatrix() = default;
  BlockSparseMatrix(std::vector<int> row_sizes, std::vector<int> col_sizes)
      : row_sizes_(std::move(row_sizes)), col_sizes_(std::move(col_sizes)) {
    row_offsets_ = offsets(row_sizes_);
    col_offsets_ = offsets(col_sizes_);
    rows_.resize(row_sizes_.size());
  }
  explicit BlockSparseMatrix(const std::vector<int>& sizes) : BlockSparseMatrix(sizes, sizes) {}

  static BlockSparseMatrix identity(const std::vector<int>& sizes) {
    BlockSparseMatrix m(sizes);
    for (int i = 0; i < m.num_block_rows(); ++i) m.add_block(i, i, Block::Identity(sizes[i], sizes[i]));
    return m;
  }

  Eigen::Index rows() const { return row_offsets_.empty() ? 0 : row_offsets_.back(); }
  Eigen::Index cols() const { return col_offsets_.empty() ? 0 : col_offsets_.back(); }
  int num_block_rows() const { return static_cast<int>(row_sizes_.size()); }
  int num_block_cols() const { return static_cast<int>(col_sizes_.size()); }
  int row_size(int i) const { return row_sizes_[i]; }
  int col_size(int j) const { return col_sizes_[j]; }
  Eigen::Index row_offset(int i) const { return row_offsets_[i]; }
  Eigen::Index col_offset(int j) const { return col_offsets_[j]; }
  const std::vector<int>& row_sizes() const { return row_sizes_; }
  const std::vector<int>& col_sizes() const { return col_sizes_; }

  template <typename Derived>
  void add_block(int i, int j, const Eigen::MatrixBase<Derived>& block) {
    if (i < 0 || j < 0 || i >= num_block_rows() || j >= num_block_cols() || block.rows() != row_sizes_[i] ||
        block.cols() != col_sizes_[j])
      throw Error(ErrorKind::DimensionMismatch,
                  "block (" + std::to_string(i) + "," + std::to_string(j) + ") does not match the layout");
    auto [it, inserted] = rows_[i].try_emplace(j);
    if (inserted)
      it->second = block;
    else
      it->second += block;
  }

  const Block* find(int i, int j) const {
    auto it = rows_[i].find(j);
    return it == rows_[i].end() ? nullptr : &it->second;
  }
  const Row& row(int i) const { return rows_[i]; }
  Row& row(int i) { return rows_[i]; }

  std::size_t num_blocks() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.size();
    return n;
  }
  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (const auto& r : rows_)
      for (const auto& [j, b] : r) n += static_cast<std::size_t>(b.size());
    return n;
  }
  /// Scalar rows holding at least one stored entry.
  Eigen::Index nonzero_rows() const {
    Eigen::Index n = 0;
    for (int i = 0; i < num_block_rows(); ++i)
      if (!rows_[i].empty()) n += row_sizes_[i];
    return n;
  }
  Scalar max_abs() const {
    Scalar m = 0;
    for (const auto& r : rows_)
      for (const auto& [j, b] : r)
        if (b.size() > 0) m = std::max<Scalar>(m, b.cwiseAbs().maxCoeff());
    return m;
  }

  Block to_dense() const {
    Block d = Block::Zero(rows(), cols());
    for (int i = 0; i < num_block_rows(); ++i)
      for (const auto& [j, b] : rows_[i]) d.block(row_offsets_[i], col_offsets_[j], b.rows(), b.cols()) = b;
    return d;
  }

  Eigen::SparseMatrix<Scalar> to_sparse() const {
    std::vector<Eigen::Triplet<Scalar>> t;
    t.reserve(nonzeros());
    for (int i = 0; i < num_block_rows(); ++i)
      for (const auto& [j, b] : rows_[i])
        for (Eigen::Index c = 0; c < b.cols(); ++c)
          for (Eigen::Index r = 0; r < b.rows(); ++r)
            if (b(r, c) != Scalar(0)) t.emplace_back(row_offsets_[i] + r, col_offsets_[j] + c, b(r, c));
    Eigen::SparseMatrix<Scalar> s(rows(), cols());
    s.setFromTriplets(t.begin(), t.end());
    return s;
  }

 private:
  static std::vector<Eigen::Index> offsets(const std::vector<int>& sizes) {
    std::vector<Eigen::Index> o(sizes.size() + 1, 0);
    for (std::size_t i = 0; i < sizes.size(); ++i) o[i + 1] = o[i] + sizes[i];
    return o;
  }

  std::vector<int> row_sizes_, col_sizes_;
  std::vector<Eigen::Index> row_offsets_, col_offsets_;
  std::vector<Row> rows_;
};

template <typename Scalar>
typename BlockSparseMatrix<Scalar>::Vector bs_matvec(const BlockSparseMatrix<Scalar>& m,
                                                     const typename BlockSparseMatrix<Scalar>::Vector& x) {
  if (x.size() != m.cols())
    throw Error(ErrorKind::DimensionMismatch, "matvec: vector length " + std::to_string(x.size()) +
                                                  " does not match " + std::to_string(m.cols()) + " columns");
  typename BlockSparseMatrix<Scalar>::Vector y = BlockSparseMatrix<Scalar>::Vector::Zero(m.rows());
  for (int i = 0; i < m.num_block_rows(); ++i) {
    auto yi = y.segment(m.row_offset(i), m.row_size(i));
    for (const auto& [j, b] : m.row(i)) yi.noalias() += b * x.segment(m.col_offset(j), m.col_size(j));
  }
  return y;
}

template <typename Scalar>
BlockSparseMatrix<Scalar> bs_transpose(const BlockSparseMatrix<Scalar>& m) {
  BlockSparseMatrix<Scalar> t(m.col_sizes(), m.row_sizes());
  for (int i = 0; i < m.num_block_rows(); ++i)
    for (const auto& [j, b] : m.row(i)) t.add_block(j, i, b.transpose());
  return t;
}

template <typename Scalar>
BlockSparseMatrix<Scalar> bs_matmat(const BlockSparseMatrix<Scalar>& a, const BlockSparseMatrix<Scalar>& b) {
  if (a.col_sizes() != b.row_sizes())
    throw Error(ErrorKind::DimensionMismatch, "matmat: inner block layouts differ");
  BlockSparseMatrix<Scalar> c(a.row_sizes(), b.col_sizes());
  for (int i = 0; i < a.num_block_rows(); ++i) {
    auto& out = c.row(i);
    for (const auto& [k, ab] : a.row(i)) {
      for (const auto& [j, bb] : b.row(k)) {
        auto [it, inserted] = out.try_emplace(j);
        if (inserted)
          it->second.noalias() = ab * bb;
        else
          it->second.noalias() += ab * bb;
      }
    }
  }
  return c;
}

/// R^T M R.
template <typename Scalar>
BlockSparseMatrix<Scalar> bs_triple_product(const BlockSparseMatrix<Scalar>& r, const BlockSparseMatrix<Scalar>& m) {
  return bs_matmat(bs_transpose(r), bs_matmat(m, r));
}

/// Scalar sub-matrix on the listed block rows and columns, in list order.
template <typename Scalar>
Eigen::SparseMatrix<Scalar> bs_extract(const BlockSparseMatrix<Scalar>& m, const std::vector<int>& block_ids) {
  std::vector<int> local(m.num_block_cols(), -1);
  std::vector<Eigen::Index> local_offset(block_ids.size() + 1, 0);
  for (std::size_t i = 0; i < block_ids.size(); ++i) {
    local[block_ids[i]] = static_cast<int>(i);
    local_offset[i + 1] = local_offset[i] + m.row_size(block_ids[i]);
  }
  std::vector<Eigen::Triplet<Scalar>> t;
  for (std::size_t i = 0; i < block_ids.size(); ++i) {
    for (const auto& [j, b] : m.row(block_ids[i])) {
      if (local[j] < 0) continue;
      for (Eigen::Index c = 0; c < b.cols(); ++c)
        for (Eigen::Index r = 0; r < b.rows(); ++r)
          if (b(r, c) != Scalar(0)) t.emplace_back(local_offset[i] + r, local_offset[local[j]] + c, b(r, c));
    }
  }
  Eigen::SparseMatrix<Scalar> s(local_offset.back(), local_offset.back());
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

}  // namespace xdg
