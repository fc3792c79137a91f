#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace xdg {

enum class Species : int { A = 0, B = 1 };

inline constexpr Species kSpecies[2] = {Species::A, Species::B};

inline int index(Species s) { return static_cast<int>(s); }
inline const char* name(Species s) { return s == Species::A ? "A" : "B"; }

/// Scalar field whose sign separates the phases: phi < 0 is species A,
/// phi > 0 is species B.
class LevelSet {
 public:
  using Value = std::function<double(const Eigen::VectorXd&)>;
  using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  /// Without an analytic gradient, central differences with step
  /// `fd_step` are used.
  LevelSet(Value value, Gradient gradient = {}, double fd_step = 1e-6);

  double operator()(const Eigen::VectorXd& x) const { return value_(x); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  /// Unit normal pointing from A into B.
  Eigen::VectorXd normal(const Eigen::VectorXd& x) const;
  bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }

  /// Re-scales the finite-difference step to 1e-6 times the domain width.
  void set_fd_step(double step) { fd_step_ = step; }

 private:
  Value value_;
  Gradient gradient_;
  double fd_step_;
};

namespace levelsets {

/// |x - c|^2 - r^2
LevelSet sphere(const Eigen::VectorXd& center, double radius);
/// n.x - offset
LevelSet plane(const Eigen::VectorXd& normal, double offset);
/// x^2 + y^2 + z^3 - (7/10)^2 (3D benchmark geometry)
LevelSet benchmark();
LevelSet constant(double value);

/// Built-in by name ("sphere", "plane", "paper-benchmark", "constant") with
/// numeric parameters: sphere = center..., radius; plane = normal..., offset;
/// constant = value.
LevelSet by_name(const std::string& name, const std::vector<double>& params, int dim);

}  // namespace levelsets

}  // namespace xdg
