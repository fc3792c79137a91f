#pragma once

#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace xdg {

/// MatrixMarket coordinate format, real general.
void write_matrix_market(const std::string& path, const Eigen::SparseMatrix<double>& m);
Eigen::SparseMatrix<double> read_matrix_market(const std::string& path);

/// MatrixMarket array format for a dense vector.
void write_matrix_market(const std::string& path, const Eigen::VectorXd& v);

}  // namespace xdg
