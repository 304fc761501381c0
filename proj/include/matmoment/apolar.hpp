#pragma once

#include <optional>
#include <vector>

#include "matmoment/functional.hpp"
#include "matmoment/hankel.hpp"

namespace matmoment {

// All alpha in N_0^d with |alpha| = m, in lexicographic tuple order.
std::vector<MultiIndex> homogeneous_indices(std::size_t d, int m);
// m! / alpha!, exact in integers up to the range of uint64.
double multinomial(int m, const MultiIndex& alpha);
double factorial(int n);

// P = sum_alpha binom(m, alpha) A_alpha x^alpha.
struct MatHomPoly {
  std::size_t d = 0;
  int m = 0;
  std::size_t q = 0;
  std::vector<MultiIndex> index;
  std::vector<HermMat> coeffs;

  MatHomPoly() = default;
  MatHomPoly(std::size_t d, int m, std::size_t q);
  std::size_t position(const MultiIndex& alpha) const;
  const HermMat& at(const MultiIndex& alpha) const { return coeffs[position(alpha)]; }
  HermMat& at(const MultiIndex& alpha) { return coeffs[position(alpha)]; }
  MatHomPoly& operator+=(const MatHomPoly& o);
  bool operator==(const MatHomPoly& o) const = default;
};

MatHomPoly operator*(double s, MatHomPoly p);

// Plain coefficients binom(m, alpha) A_alpha, and back.
std::vector<HermMat> to_monomial(const MatHomPoly& p);
MatHomPoly from_monomial(std::size_t d, int m, std::size_t q, const std::vector<HermMat>& plain);

double apolar_product(const MatHomPoly& p, const MatHomPoly& s);
MatHomPoly power_form(const std::vector<double>& y, int m, const HermMat& c);
// The polynomial x^alpha H.
MatHomPoly monomial_probe(std::size_t d, int m, const MultiIndex& alpha, const HermMat& h);
double coefficient_recovery(const MatHomPoly& p, const MultiIndex& alpha, const HermMat& h);
HermMat evaluate(const MatHomPoly& p, const std::vector<double>& y);

// R(d)S = sum_gamma <R_gamma, d^gamma S> with R_gamma the plain coefficients; a scalar (q = 1) polynomial.
MatHomPoly diff_apply(const MatHomPoly& r, const MatHomPoly& s);
// Laplacian applied to each matrix entry.
MatHomPoly laplacian(const MatHomPoly& p);

struct ConeTerm {
  std::vector<double> eta;
  HermMat c;
};

// F = sum_r C_r pi_{eta_r, m}.
struct ConeElement {
  std::size_t d = 0;
  int m = 0;
  std::size_t q = 0;
  std::vector<ConeTerm> terms;
  void validate(double tol = 1e-10) const;
  MatHomPoly polynomial() const;
  AtomicMeasure measure() const;
};

// Values on the basis x^alpha H_jk, index = position(alpha) * q^2 + jk.
struct PolyFunctional {
  std::size_t d = 0;
  int m = 0;
  std::size_t q = 0;
  std::vector<double> values;
};

double eval_functional(const PolyFunctional& lambda, const MatHomPoly& p);
// Lambda(P) = sum_j <P(x_j), M_j>, atoms carrying coordinates.
PolyFunctional poly_functional_from_measure(std::size_t d, int m, const AtomicMeasure& nu);

struct GammaResult {
  PolyFunctional functional;  // apolar path
  std::vector<double> differential;
  std::vector<double> atomic;
  double max_discrepancy = 0;
  AtomicMeasure measure;
};

GammaResult gamma_functional(const ConeElement& f);

// Throws NoMeasureProvided without a measure, NotRepresenting if the measure does not represent lambda.
ConeElement functional_to_cone(const PolyFunctional& lambda, const std::optional<AtomicMeasure>& nu,
                               double tol = 1e-8);

// ||x||^{2n} as a polynomial in d variables, times c.
MatHomPoly norm_power(std::size_t d, int n, const HermMat& c);
// Nonnegative weights w_r and directions eta_r with sum_r w_r pi_{eta_r, 2n} = ||x||^{2n};
// available for d = 1, d = 2 and d = 3 with n <= 2 (InvalidInput otherwise).
std::vector<ConeTerm> norm_power_decomposition(std::size_t d, int n);

}  // namespace matmoment
