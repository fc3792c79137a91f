#pragma once

#include <initializer_list>
#include <random>

#include <Eigen/Core>
#include <doctest.h>

#include "xdg/error.hpp"
#include "xdg/mesh.hpp"

namespace xdg::test {

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline Box box(std::initializer_list<double> lo, std::initializer_list<double> hi) { return Box{vec(lo), vec(hi)}; }

inline Eigen::VectorXd random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(gen);
  return v;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, unsigned seed) {
  return random_vector(r * c, seed).reshaped(r, c);
}

template <class F>
ErrorKind error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an xdg::Error");
  return ErrorKind::Io;
}

}  // namespace xdg::test
