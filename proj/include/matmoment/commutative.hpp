#pragma once

#include <vector>

#include "matmoment/functional.hpp"
#include "matmoment/spectra.hpp"

namespace matmoment {

// Pairwise commutators of the L(g_i) are at most tol * s^2, s = max ||L(g_i)||_F.
bool is_commutative(const MatrixMomentFunctional& l, double tol = 1e-9);

struct Diagonalization {
  CMatrix unitary;                           // U with L(g_i) = U* diag(l_1(g_i), ..., l_q(g_i)) U
  std::vector<std::vector<double>> scalars;  // scalars[r][i] = l_r(g_i)
  double reconstruction_error = 0;           // max_i ||L(g_i) - U* D_i U||_F
};

Diagonalization diagonalize(const MatrixMomentFunctional& l, double tol = 1e-9);

// The r-th scalar functional on the same domain.
MatrixMomentFunctional scalar_functional(const Diagonalization& d, const ScalarSpaceE& domain, std::size_t r);

// Masses M_x = U* diag(c_1x, ..., c_qx) U, atoms unioned over the scalar measures.
AtomicMeasure commuting_measure_from_diagonal(const CMatrix& u, const std::vector<AtomicMeasure>& scalar_measures);

struct CommutativeRepresentation {
  Diagonalization diagonal;
  std::vector<AtomicMeasure> scalar_measures;
  AtomicMeasure measure;
};

// Diagonalizes L, represents each l_r by a scalar atomic measure, and reassembles a commuting measure.
// Throws NotRepresenting when some l_r is not a moment functional.
CommutativeRepresentation represent_commutative(const MatrixMomentFunctional& l, double tol = 1e-9,
                                                const FeasibilityOptions& opts = {1e-10, 20000, Engine::kBarrier, 0});

bool masses_commute(const AtomicMeasure& nu, double tol = 1e-9);
// Densities M_j / tr M_j; zero-trace atoms are skipped.
bool densities_commute(const AtomicMeasure& nu, double tol = 1e-9);

}  // namespace matmoment
