#include "xdg/basis.hpp"

#include <cmath>

#include "xdg/error.hpp"

namespace xdg {

int basis_dimension(int degree, int dim) {
  if (degree < 0) return 0;
  long n = 1;
  for (int i = 1; i <= dim; ++i) n = n * (degree + i) / i;
  return static_cast<int>(n);
}

ReferenceBasis::ReferenceBasis(int degree, int dim) : degree_(degree), dim_(dim) {
  if (degree < 0) throw Error(ErrorKind::InvalidConfig, "polynomial degree must be >= 0");
  if (dim < 1 || dim > 3) throw Error(ErrorKind::InvalidConfig, "dimension must be 1..3");
  for (int t = 0; t <= degree; ++t) {
    if (dim == 1) {
      exponents_.push_back({t, 0, 0});
    } else if (dim == 2) {
      for (int a = t; a >= 0; --a) exponents_.push_back({a, t - a, 0});
    } else {
      for (int a = t; a >= 0; --a)
        for (int b = t - a; b >= 0; --b) exponents_.push_back({a, b, t - a - b});
    }
  }
}

int ReferenceBasis::size_up_to(int k) const { return basis_dimension(std::min(k, degree_), dim_); }

void legendre_1d(int k, double lo, double h, double x, double* value, double* deriv) {
  const double t = 2.0 * (x - lo) / h - 1.0;
  double p_prev = 1.0, p = t;
  double d_prev = 0.0, d = 1.0;
  for (int m = 0; m <= k; ++m) {
    double pm, dm;
    if (m == 0) {
      pm = 1.0;
      dm = 0.0;
    } else if (m == 1) {
      pm = t;
      dm = 1.0;
    } else {
      const double pn = ((2.0 * m - 1.0) * t * p - (m - 1.0) * p_prev) / m;
      const double dn = d_prev + (2.0 * m - 1.0) * p;
      p_prev = p;
      p = pn;
      d_prev = d;
      d = dn;
      pm = pn;
      dm = dn;
    }
    const double scale = std::sqrt((2.0 * m + 1.0) / h);
    value[m] = scale * pm;
    if (deriv) deriv[m] = scale * dm * 2.0 / h;
  }
}

void ReferenceBasis::eval(const Box& cell, const Eigen::Ref<const Eigen::MatrixXd>& points,
                          Eigen::MatrixXd& values, std::vector<Eigen::MatrixXd>* grads) const {
  const Eigen::Index nq = points.cols();
  const int N = size();
  const int k1 = degree_ + 1;
  values.resize(nq, N);
  if (grads) {
    grads->resize(dim_);
    for (auto& g : *grads) g.resize(nq, N);
  }
  std::vector<double> v(3 * k1), dv(3 * k1);
  for (Eigen::Index q = 0; q < nq; ++q) {
    for (int d = 0; d < dim_; ++d)
      legendre_1d(degree_, cell.lo[d], cell.hi[d] - cell.lo[d], points(d, q), &v[d * k1], &dv[d * k1]);
    for (int n = 0; n < N; ++n) {
      const auto& e = exponents_[n];
      double val = 1.0;
      for (int d = 0; d < dim_; ++d) val *= v[d * k1 + e[d]];
      values(q, n) = val;
      if (!grads) continue;
      for (int g = 0; g < dim_; ++g) {
        double gv = 1.0;
        for (int d = 0; d < dim_; ++d) gv *= d == g ? dv[d * k1 + e[d]] : v[d * k1 + e[d]];
        (*grads)[g](q, n) = gv;
      }
    }
  }
}

Eigen::VectorXd ReferenceBasis::moments(const Box& cell, const Eigen::Ref<const Eigen::MatrixXd>& points,
                                        const Eigen::Ref<const Eigen::VectorXd>& weights) const {
  // Moment tensor T(a, b, c) = sum_q w_q v0_a v1_b v2_c over a + b + c <= k.
  const int k1 = degree_ + 1;
  std::vector<double> T(k1 * k1 * k1, 0.0), v(3 * k1, 1.0), dv(3 * k1);
  for (Eigen::Index q = 0; q < points.cols(); ++q) {
    for (int d = 0; d < dim_; ++d)
      legendre_1d(degree_, cell.lo[d], cell.hi[d] - cell.lo[d], points(d, q), &v[d * k1], &dv[d * k1]);
    const double* v1 = &v[k1];
    const double* v2 = &v[2 * k1];
    for (int a = 0; a < k1; ++a) {
      const double wa = weights[q] * v[a];
      for (int b = 0; a + b < k1; ++b) {
        const double t = wa * v1[b];
        double* row = &T[(a * k1 + b) * k1];
        for (int c = 0; a + b + c < k1; ++c) row[c] += t * v2[c];
      }
    }
  }
  Eigen::VectorXd m(size());
  for (int i = 0; i < size(); ++i) {
    const auto& e = exponents_[i];
    m[i] = T[(e[0] * k1 + e[1]) * k1 + e[2]];
  }
  return m;
}

}  // namespace xdg
