#pragma once

#include <cstdint>
#include <vector>

#include "matmoment/functional.hpp"

namespace matmoment {

// phi(A) = sum_j V_j* A' V_j with A' = A^T when transpose_first, else A. Each V_j is q x p.
struct PositiveMap {
  std::size_t q = 0;
  std::size_t p = 0;
  std::vector<CMatrix> kraus;
  bool transpose_first = false;

  // Throws DimensionMismatch on inconsistent factors, InvalidInput if a PSD test matrix maps outside the cone.
  void validate(std::uint64_t seed = 1) const;
};

PositiveMap trace_map(std::size_t q);
PositiveMap compression_map(const CMatrix& basis);  // columns: orthonormal basis of U
PositiveMap identity_map(std::size_t q);
PositiveMap transpose_map(std::size_t q);

HermMat apply(const PositiveMap& phi, const HermMat& a);
CMatrix apply_general(const PositiveMap& phi, const CMatrix& a);
PositiveMap adjoint(const PositiveMap& phi);

AtomicMeasure pushforward_measure(const PositiveMap& phi, const AtomicMeasure& mu);
MatrixMomentFunctional transport_functional(const PositiveMap& phi, const MatrixMomentFunctional& l);

// Coefficients (lifted to size q) of phi-dagger applied pointwise to F = sum c_{i,jk} g_i H_jk (lifted to size p).
std::vector<double> pullback_coefficients(const PositiveMap& phi, const std::vector<double>& coeffs);

// L_otimes(F) = sum_jk H_jk (x) L(<F, H_jk>) for F with coefficients over the lift of size qf.
CMatrix l_otimes(const MatrixMomentFunctional& l, std::size_t qf, const std::vector<double>& coeffs);
// (id (x) phi) on a (n q) x (n q) matrix, n the size of the first factor.
CMatrix id_tensor_apply(const PositiveMap& phi, std::size_t n, const CMatrix& x);
CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace matmoment
