#include "xdg/levelset.hpp"

#include <cmath>

#include "xdg/error.hpp"

namespace xdg {

LevelSet::LevelSet(Value value, Gradient gradient, double fd_step)
    : value_(std::move(value)), gradient_(std::move(gradient)), fd_step_(fd_step) {}

Eigen::VectorXd LevelSet::gradient(const Eigen::VectorXd& x) const {
  if (gradient_) return gradient_(x);
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd y = x;
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    y[d] = x[d] + fd_step_;
    const double fp = value_(y);
    y[d] = x[d] - fd_step_;
    const double fm = value_(y);
    y[d] = x[d];
    g[d] = (fp - fm) / (2.0 * fd_step_);
  }
  return g;
}

Eigen::VectorXd LevelSet::normal(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = gradient(x);
  const double n = g.norm();
  if (n == 0.0) throw Error(ErrorKind::DegenerateLevelSet, "vanishing level-set gradient on the interface");
  return g / n;
}

namespace levelsets {

LevelSet sphere(const Eigen::VectorXd& center, double radius) {
  return LevelSet([=](const Eigen::VectorXd& x) { return (x - center).squaredNorm() - radius * radius; },
                  [=](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 2.0 * (x - center); });
}

LevelSet plane(const Eigen::VectorXd& normal, double offset) {
  return LevelSet([=](const Eigen::VectorXd& x) { return normal.dot(x) - offset; },
                  [=](const Eigen::VectorXd&) -> Eigen::VectorXd { return normal; });
}

LevelSet benchmark() {
  return LevelSet(
      [](const Eigen::VectorXd& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] * x[2] - 0.49; },
      [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd g(3);
        g << 2.0 * x[0], 2.0 * x[1], 3.0 * x[2] * x[2];
        return g;
      });
}

LevelSet constant(double value) {
  return LevelSet([=](const Eigen::VectorXd&) { return value; },
                  [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(x.size()); });
}

LevelSet by_name(const std::string& name, const std::vector<double>& params, int dim) {
  if (name == "paper-benchmark") {
    if (dim != 3) throw Error(ErrorKind::InvalidConfig, "paper-benchmark level-set is three-dimensional");
    return benchmark();
  }
  if (name == "sphere") {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
    double r = 0.7;
    if (params.size() == 1) {
      r = params[0];
    } else if (params.size() == static_cast<std::size_t>(dim) + 1) {
      for (int d = 0; d < dim; ++d) c[d] = params[d];
      r = params[dim];
    } else if (!params.empty()) {
      throw Error(ErrorKind::InvalidConfig, "sphere expects [center..., ] radius");
    }
    return sphere(c, r);
  }
  if (name == "plane") {
    if (params.size() != static_cast<std::size_t>(dim) + 1)
      throw Error(ErrorKind::InvalidConfig, "plane expects normal..., offset");
    Eigen::VectorXd n(dim);
    for (int d = 0; d < dim; ++d) n[d] = params[d];
    return plane(n, params[dim]);
  }
  if (name == "constant") return constant(params.empty() ? -1.0 : params[0]);
  throw Error(ErrorKind::InvalidConfig, "unknown level-set '" + name + "'");
}

}  // namespace levelsets

}  // namespace xdg
