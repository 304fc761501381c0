#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace matmoment {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

inline constexpr double kHermitianTol = 1e-12;

// Dense row-major complex matrix.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static CMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<Complex>& data() const { return data_; }

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix conj() const;
  double frobenius_norm() const;
  CVector column(std::size_t j) const;
  void set_column(std::size_t j, const CVector& v);
  CMatrix columns(const std::vector<std::size_t>& idx) const;
  CMatrix rows_subset(const std::vector<std::size_t>& idx) const;

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(Complex s);

  bool operator==(const CMatrix& o) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(Complex s, CMatrix a);
CVector operator*(const CMatrix& a, const CVector& v);

// A q x q Hermitian matrix, stored exactly Hermitian.
class HermMat {
 public:
  HermMat() = default;
  explicit HermMat(std::size_t q) : m_(q, q) {}

  // Throws InvalidInput when m deviates from hermiticity by more than tol.
  static HermMat from_matrix(const CMatrix& m, double tol = kHermitianTol);
  static HermMat hermitian_part(const CMatrix& m);
  static HermMat identity(std::size_t q);
  static HermMat diagonal(const std::vector<double>& d);
  static HermMat outer(const CVector& v);

  std::size_t dim() const { return m_.rows(); }
  Complex operator()(std::size_t j, std::size_t k) const { return m_(j, k); }
  const CMatrix& matrix() const { return m_; }
  double trace() const;
  double frobenius_norm() const { return m_.frobenius_norm(); }

  HermMat& operator+=(const HermMat& o);
  HermMat& operator-=(const HermMat& o);
  HermMat& operator*=(double s);

  bool operator==(const HermMat& o) const = default;

 private:
  CMatrix m_;
};

HermMat operator+(HermMat a, const HermMat& b);
HermMat operator-(HermMat a, const HermMat& b);
HermMat operator*(double s, HermMat a);
HermMat operator*(HermMat a, double s);

// Re tr(XY); equals tr(XY*) for Hermitian arguments.
double trace_inner(const HermMat& x, const HermMat& y);

// The orthonormal basis H_jk of H_q (0-based j,k), flattened as j*q+k.
HermMat hjk(std::size_t q, std::size_t j, std::size_t k);
std::vector<HermMat> hjk_basis(std::size_t q);
// Coordinates <A, H_jk> in flattened order, and the inverse map.
std::vector<double> hjk_coords(const HermMat& a);
HermMat from_hjk_coords(std::size_t q, const double* c);
HermMat from_hjk_coords(std::size_t q, const std::vector<double>& c);

struct EigenDecomp {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns
};

// Cyclic complex Jacobi. The matrix argument must be Hermitian.
EigenDecomp eig_herm(const HermMat& a, int max_sweeps = 100);
EigenDecomp eig_herm(const CMatrix& a, int max_sweeps = 100);

double spectral_radius(const HermMat& a);
double min_eigenvalue(const HermMat& a);
bool psd_check(const HermMat& a, double tol = 1e-10);
HermMat psd_project(const HermMat& a);
bool loewner_geq(const HermMat& a, const HermMat& b, double tol = 1e-10);

// f applied to the eigenvalues of a.
template <class F>
HermMat spectral_map(const HermMat& a, F f) {
  EigenDecomp e = eig_herm(a);
  std::size_t q = a.dim();
  CMatrix out(q, q);
  for (std::size_t r = 0; r < q; ++r) {
    double w = f(e.values[r]);
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = 0; j < q; ++j)
        out(i, j) += w * e.vectors(i, r) * std::conj(e.vectors(j, r));
  }
  return HermMat::hermitian_part(out);
}

double commutator_norm(const CMatrix& a, const CMatrix& b);

struct SimultaneousDiag {
  CMatrix unitary;                            // columns are common eigenvectors
  std::vector<std::vector<double>> diagonals;  // one per family member
};

// Throws CommutatorTooLarge when some ||[A_i, A_j]||_F > tol * s^2, s = max ||A_i||_F.
SimultaneousDiag simultaneous_diagonalize(const std::vector<HermMat>& family, double tol = 1e-9);

}  // namespace matmoment
