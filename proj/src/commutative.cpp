#include "matmoment/commutative.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "matmoment/error.hpp"

namespace matmoment {

namespace {

bool family_commutes(const std::vector<HermMat>& fam, double tol) {
  double s = 0;
  for (const auto& a : fam) s = std::max(s, a.frobenius_norm());
  if (s == 0) return true;
  for (std::size_t i = 0; i < fam.size(); ++i)
    for (std::size_t j = i + 1; j < fam.size(); ++j)
      if (commutator_norm(fam[i].matrix(), fam[j].matrix()) > tol * s * s) return false;
  return true;
}

HermMat conjugate_diag(const CMatrix& u, const std::vector<double>& diag) {
  std::size_t q = diag.size();
  CMatrix d(q, q);
  for (std::size_t r = 0; r < q; ++r) d(r, r) = diag[r];
  return HermMat::hermitian_part(u.adjoint() * d * u);
}

}  // namespace

bool is_commutative(const MatrixMomentFunctional& l, double tol) { return family_commutes(l.values, tol); }

Diagonalization diagonalize(const MatrixMomentFunctional& l, double tol) {
  std::size_t q = l.q();
  Diagonalization out;
  if (l.values.empty()) return out;
  SimultaneousDiag sd = simultaneous_diagonalize(l.values, tol);
  out.unitary = sd.unitary.adjoint();
  out.scalars.assign(q, std::vector<double>(l.values.size(), 0.0));
  for (std::size_t i = 0; i < l.values.size(); ++i) {
    for (std::size_t r = 0; r < q; ++r) out.scalars[r][i] = sd.diagonals[i][r];
    HermMat back = conjugate_diag(out.unitary, sd.diagonals[i]);
    out.reconstruction_error = std::max(out.reconstruction_error, (back - l.values[i]).frobenius_norm());
  }
  return out;
}

MatrixMomentFunctional scalar_functional(const Diagonalization& d, const ScalarSpaceE& domain, std::size_t r) {
  if (r >= d.scalars.size()) throw Error(Errc::kInvalidInput, "scalar functional index out of range");
  MatrixMomentFunctional out{domain, {}};
  for (double v : d.scalars[r]) out.values.push_back(HermMat::diagonal({v}));
  return out;
}

AtomicMeasure commuting_measure_from_diagonal(const CMatrix& u, const std::vector<AtomicMeasure>& scalar_measures) {
  std::size_t q = u.rows();
  if (scalar_measures.size() != q) throw Error(Errc::kDimensionMismatch, "one scalar measure per diagonal entry");
  std::vector<std::string> labels;
  std::vector<std::vector<double>> coords;
  std::vector<std::vector<double>> weights;
  for (std::size_t r = 0; r < q; ++r)
    for (const auto& a : scalar_measures[r].atoms) {
      if (a.mass.dim() != 1) throw Error(Errc::kDimensionMismatch, "scalar measure expected");
      double w = a.mass(0, 0).real();
      if (w < 0) throw Error(Errc::kNegativeWeight, "negative weight at " + a.label);
      auto it = std::find(labels.begin(), labels.end(), a.label);
      std::size_t j = static_cast<std::size_t>(it - labels.begin());
      if (it == labels.end()) {
        labels.push_back(a.label);
        coords.push_back(a.coords);
        weights.emplace_back(q, 0.0);
      }
      weights[j][r] += w;
    }
  AtomicMeasure out;
  for (std::size_t j = 0; j < labels.size(); ++j)
    out.atoms.push_back({labels[j], conjugate_diag(u, weights[j]), coords[j]});
  return out;
}

CommutativeRepresentation represent_commutative(const MatrixMomentFunctional& l, double tol,
                                                const FeasibilityOptions& opts) {
  CommutativeRepresentation out;
  out.diagonal = diagonalize(l, tol);
  auto scalar_space = std::make_shared<const MatrixFunctionSpace>(lift_scalar_space(l.domain, 1));
  // Diagonal entries carry round-off of the size of L itself, so feasibility is judged on that scale.
  FeasibilityOptions fo = opts;
  if (fo.scale <= 0) {
    double s = 0;
    for (const auto& v : l.values) s += std::pow(v.frobenius_norm(), 2);
    fo.scale = std::sqrt(s);
  }
  for (std::size_t r = 0; r < l.q(); ++r) {
    MatrixMomentFunctional lr = scalar_functional(out.diagonal, l.domain, r);
    MomentFunctional lam = functional_from_L(lr);
    lam.domain = scalar_space;
    FeasibilityReport rep = is_moment_functional(lam, fo);
    if (!rep.feasible())
      throw Error(Errc::kNotRepresenting, "diagonal functional " + std::to_string(r) + " is not a moment functional (" +
                                              status_name(rep.status) + ", margin " + std::to_string(rep.margin) + ")");
    AtomicMeasure nu;
    for (const auto& a : rep.witness->atoms)
      if (a.mass(0, 0).real() > 0) nu.atoms.push_back(a);
    out.scalar_measures.push_back(std::move(nu));
  }
  out.measure = commuting_measure_from_diagonal(out.diagonal.unitary, out.scalar_measures);
  return out;
}

bool masses_commute(const AtomicMeasure& nu, double tol) {
  std::vector<HermMat> fam;
  for (const auto& a : nu.atoms) fam.push_back(a.mass);
  return family_commutes(fam, tol);
}

bool densities_commute(const AtomicMeasure& nu, double tol) {
  std::vector<HermMat> fam;
  for (const auto& a : nu.atoms)
    if (a.mass.trace() > 0) fam.push_back((1.0 / a.mass.trace()) * a.mass);
  return family_commutes(fam, tol);
}

}  // namespace matmoment
