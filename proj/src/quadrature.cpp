#include "xdg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "xdg/error.hpp"

namespace xdg {

void QuadRule::append(const QuadRule& other) {
  if (other.empty()) return;
  const Eigen::Index n = size();
  const Eigen::Index m = other.size();
  if (points.rows() == 0) points.resize(other.points.rows(), 0);
  points.conservativeResize(other.points.rows(), n + m);
  points.rightCols(m) = other.points;
  weights.conservativeResize(n + m);
  weights.tail(m) = other.weights;
  if (other.has_normals()) {
    normals.conservativeResize(other.points.rows(), n + m);
    normals.rightCols(m) = other.normals;
  }
}

namespace {

// Golub-Welsch for Jacobi weight (1+x)^beta on [-1,1], mapped to [0,1].
void golub_welsch(int n, double beta, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  const double alpha = 0.0;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double s = 2.0 * i + alpha + beta;
    T(i, i) = i == 0 ? (beta - alpha) / (alpha + beta + 2.0)
                     : (beta * beta - alpha * alpha) / (s * (s + 2.0));
    if (i + 1 < n) {
      const double k = i + 1.0;
      const double sk = 2.0 * k + alpha + beta;
      const double b = std::sqrt(4.0 * k * (k + alpha) * (k + beta) * (k + alpha + beta) /
                                 (sk * sk * (sk + 1.0) * (sk - 1.0)));
      T(i, i + 1) = T(i + 1, i) = b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  const double mu0 = std::pow(2.0, alpha + beta + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                     std::tgamma(alpha + beta + 2.0);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    // x in [-1,1] -> u = (1+x)/2; (1+x)^beta dx = 2^(beta+1) u^beta du
    nodes[i] = 0.5 * (1.0 + es.eigenvalues()[i]);
    weights[i] = mu0 * v0 * v0 / std::pow(2.0, beta + 1.0);
  }
}

}  // namespace

void gauss_jacobi_01(int n, int power, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) throw Error(ErrorKind::InvalidConfig, "quadrature needs at least one point");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::pair<Eigen::VectorXd, Eigen::VectorXd>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({n, power});
  if (it == cache.end()) {
    Eigen::VectorXd x, w;
    golub_welsch(n, power, x, w);
    it = cache.emplace(std::make_pair(n, power), std::make_pair(x, w)).first;
  }
  nodes = it->second.first;
  weights = it->second.second;
}

QuadRule tensor_rule(const Box& box, int order) {
  const int D = box.dim();
  const int n = gauss_points_for_order(order);
  Eigen::VectorXd x, w;
  gauss_jacobi_01(n, 0, x, w);
  std::vector<int> active;
  for (int d = 0; d < D; ++d)
    if (box.hi[d] > box.lo[d]) active.push_back(d);
  const int a = static_cast<int>(active.size());
  Eigen::Index total = 1;
  for (int i = 0; i < a; ++i) total *= n;
  QuadRule rule;
  rule.points.resize(D, total);
  rule.weights.resize(total);
  for (Eigen::Index q = 0; q < total; ++q) {
    Eigen::Index rem = q;
    double weight = 1.0;
    rule.points.col(q) = box.lo;
    for (int i = 0; i < a; ++i) {
      const int d = active[i];
      const Eigen::Index idx = rem % n;
      rem /= n;
      const double width = box.hi[d] - box.lo[d];
      rule.points(d, q) = box.lo[d] + width * x[idx];
      weight *= width * w[idx];
    }
    rule.weights[q] = weight;
  }
  return rule;
}

double simplex_measure(const Eigen::Ref<const Eigen::MatrixXd>& v) {
  const Eigen::Index k = v.cols() - 1;
  Eigen::MatrixXd E(v.rows(), k);
  for (Eigen::Index i = 0; i < k; ++i) E.col(i) = v.col(i + 1) - v.col(0);
  double fact = 1.0;
  for (Eigen::Index i = 2; i <= k; ++i) fact *= static_cast<double>(i);
  const double g = (E.transpose() * E).determinant();
  return std::sqrt(std::max(g, 0.0)) / fact;
}

QuadRule simplex_rule(const Eigen::Ref<const Eigen::MatrixXd>& v, int order) {
  const Eigen::Index D = v.rows();
  const Eigen::Index k = v.cols() - 1;
  if (k < 1 || k > 3) throw Error(ErrorKind::InvalidInput, "simplex rule supports dimension 1..3");
  const double vol = simplex_measure(v);
  const int n = gauss_points_for_order(order);
  QuadRule rule;
  if (k == 1) {
    Eigen::VectorXd x, w;
    gauss_jacobi_01(n, 0, x, w);
    rule.points.resize(D, n);
    rule.weights = vol * w;
    for (int i = 0; i < n; ++i) rule.points.col(i) = v.col(0) + x[i] * (v.col(1) - v.col(0));
    return rule;
  }
  if (k == 2) {
    // barycentric: l1 = u(1-s), l2 = u s; jacobian 2|T| u
    Eigen::VectorXd xu, wu, xs, ws;
    gauss_jacobi_01(n, 1, xu, wu);
    gauss_jacobi_01(n, 0, xs, ws);
    rule.points.resize(D, n * n);
    rule.weights.resize(n * n);
    int q = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j, ++q) {
        const double l1 = xu[i] * (1.0 - xs[j]);
        const double l2 = xu[i] * xs[j];
        rule.points.col(q) = v.col(0) + l1 * (v.col(1) - v.col(0)) + l2 * (v.col(2) - v.col(0));
        rule.weights[q] = 2.0 * vol * wu[i] * ws[j];
      }
    return rule;
  }
  // k == 3: l1 = u(1-s), l2 = u s (1-t), l3 = u s t; jacobian 6|T| u^2 s
  Eigen::VectorXd xu, wu, xs, ws, xt, wt;
  gauss_jacobi_01(n, 2, xu, wu);
  gauss_jacobi_01(n, 1, xs, ws);
  gauss_jacobi_01(n, 0, xt, wt);
  rule.points.resize(D, n * n * n);
  rule.weights.resize(n * n * n);
  int q = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l, ++q) {
        const double l1 = xu[i] * (1.0 - xs[j]);
        const double l2 = xu[i] * xs[j] * (1.0 - xt[l]);
        const double l3 = xu[i] * xs[j] * xt[l];
        rule.points.col(q) = v.col(0) + l1 * (v.col(1) - v.col(0)) + l2 * (v.col(2) - v.col(0)) +
                             l3 * (v.col(3) - v.col(0));
        rule.weights[q] = 6.0 * vol * wu[i] * ws[j] * wt[l];
      }
  return rule;
}

}  // namespace xdg
