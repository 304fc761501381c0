#pragma once

#include <cstddef>
#include <vector>

#include "matmoment/hermitian.hpp"

namespace matmoment {

// Thin SVD A = U diag(s) V*, s descending, k = min(rows, cols).
struct Svd {
  CMatrix u;
  std::vector<double> s;
  CMatrix v;
};

Svd svd(const CMatrix& a, int max_sweeps = 80);

// Default cutoff: largest singular value * max(rows, cols) * 1e-12.
double rank_cutoff(const Svd& d, std::size_t rows, std::size_t cols, double rel = 1e-12);
std::size_t numerical_rank(const CMatrix& a, double rel = 1e-12);

// Minimum-norm least-squares solution of A X = B.
CMatrix lstsq(const CMatrix& a, const CMatrix& b, double rel = 1e-12);
CMatrix pinv(const CMatrix& a, double rel = 1e-12);

// Orthonormal basis (columns) of ker A.
CMatrix null_space(const CMatrix& a, double rel = 1e-12);

// Orthonormal basis of the complement of span(cols of q), q having orthonormal columns.
CMatrix orthogonal_complement(const CMatrix& q);

// Real helpers on row-major std::vector<double>.
struct RMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  RMatrix() = default;
  RMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

CMatrix to_complex(const RMatrix& a);
RMatrix real_part(const CMatrix& a);

// Cholesky solve of a symmetric positive definite system; returns false if not PD.
bool cholesky_solve(std::vector<double> a, std::size_t n, std::vector<double>& b);

// Independent subset of columns, chosen greedily left to right (Gram-Schmidt with cutoff).
std::vector<std::size_t> independent_columns(const CMatrix& a, double rel = 1e-10);

}  // namespace matmoment
