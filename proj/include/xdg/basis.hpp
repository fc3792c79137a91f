#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "xdg/mesh.hpp"

namespace xdg {

/// binomial(k + D, D): number of polynomials of total degree <= k in D variables.
int basis_dimension(int degree, int dim);

/// Orthonormal polynomials of total degree <= k on an axis-aligned box:
/// products of scaled Legendre polynomials, ordered by total degree.
class ReferenceBasis {
 public:
  ReferenceBasis(int degree, int dim);

  int degree() const { return degree_; }
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  const std::array<int, 3>& exponents(int n) const { return exponents_[n]; }
  /// Number of leading modes with total degree <= k.
  int size_up_to(int k) const;

  /// values(q, n) = Phi_n(x_q); grads[d](q, n) = d/dx_d Phi_n(x_q).
  /// Points are the columns of `points`.
  void eval(const Box& cell, const Eigen::Ref<const Eigen::MatrixXd>& points, Eigen::MatrixXd& values,
            std::vector<Eigen::MatrixXd>* grads = nullptr) const;
  /// sum_q w_q Phi_n(x_q) for every n.
  Eigen::VectorXd moments(const Box& cell, const Eigen::Ref<const Eigen::MatrixXd>& points,
                          const Eigen::Ref<const Eigen::VectorXd>& weights) const;

 private:
  int degree_;
  int dim_;
  std::vector<std::array<int, 3>> exponents_;
};

/// Scaled Legendre values sqrt((2m+1)/h) P_m(t) and their x-derivatives for
/// m = 0..k at x in [lo, lo+h].
void legendre_1d(int k, double lo, double h, double x, double* value, double* deriv);

}  // namespace xdg
