#pragma once

#include <Eigen/Core>

#include "xdg/mesh.hpp"

namespace xdg {

/// Quadrature rule in physical coordinates. Points are stored column-wise
/// (D x n). Surface rules may carry one unit normal per node.
struct QuadRule {
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;
  Eigen::MatrixXd normals;

  QuadRule() = default;
  explicit QuadRule(int dim) : points(dim, 0), weights(0) {}

  Eigen::Index size() const { return weights.size(); }
  bool empty() const { return weights.size() == 0; }
  bool has_normals() const { return normals.cols() == points.cols() && normals.cols() > 0; }
  double measure() const { return weights.sum(); }

  void append(const QuadRule& other);
};

/// Gauss points on [0,1] for the weight u^power (power 0: Gauss-Legendre).
/// Exact for polynomials of degree 2n-1 times the weight.
void gauss_jacobi_01(int n, int power, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Number of Gauss points per axis that integrates degree `order` exactly.
inline int gauss_points_for_order(int order) { return order / 2 + 1; }

/// Tensor Gauss rule on a box; zero-width axes are dropped, so a face box
/// yields a (D-1)-dimensional surface rule.
QuadRule tensor_rule(const Box& box, int order);

/// Rule on a k-simplex (k = 1, 2, 3) embedded in R^D, given as the
/// D x (k+1) vertex matrix; collapsed-coordinate Gauss-Jacobi product.
QuadRule simplex_rule(const Eigen::Ref<const Eigen::MatrixXd>& vertices, int order);

/// k-dimensional measure of a k-simplex embedded in R^D.
double simplex_measure(const Eigen::Ref<const Eigen::MatrixXd>& vertices);

}  // namespace xdg
