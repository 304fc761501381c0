#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "matmoment/functional.hpp"
#include "matmoment/hermitian.hpp"

namespace mmtest {

using namespace matmoment;

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double normal() { return std::normal_distribution<double>()(rng); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  CMatrix cmatrix(std::size_t r, std::size_t c) {
    CMatrix a(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) a(i, j) = Complex(normal(), normal());
    return a;
  }
  HermMat herm(std::size_t q) { return HermMat::hermitian_part(cmatrix(q, q)); }
  HermMat psd(std::size_t q, std::size_t rank) {
    CMatrix g = cmatrix(q, rank);
    return HermMat::hermitian_part(g * g.adjoint());
  }
  HermMat psd(std::size_t q) { return psd(q, q); }
  CVector vec(std::size_t q) {
    CVector v(q);
    for (auto& z : v) z = Complex(normal(), normal());
    return v;
  }
  CMatrix unitary(std::size_t q) { return eig_herm(herm(q)).vectors; }
};

inline HermMat a_eta(double eta) {
  CMatrix m(2, 2);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(0, 1) = eta;
  m(1, 0) = eta;
  return HermMat::from_matrix(m);
}

inline HermMat herm2(double a, Complex b, double d) {
  CMatrix m(2, 2);
  m(0, 0) = a;
  m(1, 1) = d;
  m(0, 1) = b;
  m(1, 0) = std::conj(b);
  return HermMat::from_matrix(m);
}

// Points on the line with the scalar space span{1, x, ..., x^deg}.
inline ScalarSpaceE line_space(const std::vector<double>& xs, int deg) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < xs.size(); ++i) pts.push_back({"x" + std::to_string(i), {xs[i]}});
  std::vector<std::vector<double>> basis(deg + 1);
  for (double x : xs) {
    double p = 1;
    for (int k = 0; k <= deg; ++k, p *= x) basis[k].push_back(p);
  }
  return ScalarSpaceE(FiniteSpace(pts), basis, true);
}

inline std::shared_ptr<const MatrixFunctionSpace> lifted(const ScalarSpaceE& e, std::size_t q) {
  return std::make_shared<const MatrixFunctionSpace>(lift_scalar_space(e, q));
}

}  // namespace mmtest
