#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "matmoment/hermitian.hpp"
#include "matmoment/linalg.hpp"

namespace matmoment {

struct Point {
  std::string label;
  std::vector<double> coords;  // may be empty
};

class FiniteSpace {
 public:
  FiniteSpace() = default;
  explicit FiniteSpace(std::vector<Point> points);

  std::size_t size() const { return points_.size(); }
  const Point& point(std::size_t i) const { return points_[i]; }
  const std::vector<Point>& points() const { return points_; }
  std::optional<std::size_t> find(const std::string& label) const;
  // Throws UnknownPoint.
  std::size_t index_of(const std::string& label) const;
  bool operator==(const FiniteSpace& o) const;

 private:
  std::vector<Point> points_;
};

class ScalarSpaceE {
 public:
  ScalarSpaceE() = default;
  // basis[i][x] = g_i(x). Throws InvalidInput on dependent tables or a false contains_one.
  ScalarSpaceE(FiniteSpace space, std::vector<std::vector<double>> basis, bool contains_one);

  const FiniteSpace& space() const { return space_; }
  std::size_t dim() const { return basis_.size(); }
  double value(std::size_t i, std::size_t x) const { return basis_[i][x]; }
  const std::vector<std::vector<double>>& basis() const { return basis_; }
  bool contains_one() const { return contains_one_; }
  // Coefficients of the constant 1 (only when contains_one).
  const std::vector<double>& one_coefficients() const { return one_; }
  double evaluate(const std::vector<double>& c, std::size_t x) const;

 private:
  FiniteSpace space_;
  std::vector<std::vector<double>> basis_;
  bool contains_one_ = false;
  std::vector<double> one_;
};

// Indices of a linearly independent subset of scalar tables (greedy, in order).
std::vector<std::size_t> independent_subset(const std::vector<std::vector<double>>& tables, double rel = 1e-10);

struct UnitElement {
  std::vector<double> coeffs;
  double epsilon = 0;
};

class MatrixFunctionSpace {
 public:
  MatrixFunctionSpace() = default;
  // basis[i][x] = F_i(x). Throws InvalidInput on dependent tables or an invalid unit element.
  MatrixFunctionSpace(FiniteSpace space, std::size_t q, std::vector<std::vector<HermMat>> basis,
                      std::optional<UnitElement> unit = std::nullopt);

  const FiniteSpace& space() const { return space_; }
  std::size_t q() const { return q_; }
  std::size_t dim() const { return basis_.size(); }
  const HermMat& value(std::size_t i, std::size_t x) const { return basis_[i][x]; }
  const std::vector<std::vector<HermMat>>& basis() const { return basis_; }
  const std::optional<UnitElement>& unit() const { return unit_; }
  HermMat evaluate(const std::vector<double>& c, std::size_t x) const;

  // Set when built by lift_scalar_space; basis index = i*q^2 + (j*q+k) for g_i H_jk.
  const std::optional<ScalarSpaceE>& lift_source() const { return lift_; }
  void set_lift_source(ScalarSpaceE e) { lift_ = std::move(e); }

  // Rows: basis elements. Columns: (point x, H_jk coordinate). Lambda^nu(F_i) = A[i] . m.
  const RMatrix& constraint_matrix() const { return constraint_; }

  // Least-squares coefficients of a table; residual (Frobenius, absolute) written to *residual.
  std::vector<double> coefficients_of(const std::vector<HermMat>& table, double* residual = nullptr) const;

 private:
  FiniteSpace space_;
  std::size_t q_ = 0;
  std::vector<std::vector<HermMat>> basis_;
  std::optional<UnitElement> unit_;
  std::optional<ScalarSpaceE> lift_;
  RMatrix constraint_;
};

struct MatrixMomentFunctional {
  ScalarSpaceE domain;
  std::vector<HermMat> values;  // L(g_i)
  std::size_t q() const { return values.empty() ? 0 : values.front().dim(); }
};

struct MomentFunctional {
  std::shared_ptr<const MatrixFunctionSpace> domain;
  std::vector<double> values;  // Lambda(F_i)

  MomentFunctional() = default;
  MomentFunctional(std::shared_ptr<const MatrixFunctionSpace> d, std::vector<double> v);
  MomentFunctional(const MatrixFunctionSpace& d, std::vector<double> v);
  double norm() const;
};

struct Atom {
  std::string label;
  HermMat mass;
  std::vector<double> coords;  // optional
};

struct AtomicMeasure {
  std::vector<Atom> atoms;
  // Throws InvalidInput on duplicate labels or non-PSD masses.
  void validate(double tol = 1e-9) const;
  std::size_t q() const { return atoms.empty() ? 0 : atoms.front().mass.dim(); }
};

MatrixFunctionSpace lift_scalar_space(const ScalarSpaceE& e, std::size_t q);
MomentFunctional functional_from_L(const MatrixMomentFunctional& l);
MatrixMomentFunctional recover_L(const MomentFunctional& lambda);
double eval_functional(const MomentFunctional& lambda, const std::vector<double>& coeffs);
MomentFunctional functional_from_measure(const MatrixFunctionSpace& space, const AtomicMeasure& nu);
MomentFunctional functional_from_measure(std::shared_ptr<const MatrixFunctionSpace> space, const AtomicMeasure& nu);
// L^nu(g_i) = sum_j g_i(x_j) M_j.
MatrixMomentFunctional matrix_functional_from_measure(const ScalarSpaceE& e, const AtomicMeasure& nu);

// ||a - b||_2 / max(||b||_2, tiny).
double relative_error(const std::vector<double>& a, const std::vector<double>& b);

AtomicMeasure richter_reduce(const MatrixFunctionSpace& space, const MomentFunctional& lambda,
                             const AtomicMeasure& nu, double tol = 1e-8);

}  // namespace matmoment
