#include "matmoment/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "matmoment/error.hpp"

namespace matmoment {

FiniteSpace::FiniteSpace(std::vector<Point> points) : points_(std::move(points)) {
  std::set<std::string> seen;
  for (const auto& p : points_) {
    if (!seen.insert(p.label).second) throw Error(Errc::kInvalidInput, "duplicate point label '" + p.label + "'");
    if (!p.coords.empty() && p.coords.size() != points_.front().coords.size())
      throw Error(Errc::kInvalidInput, "point coordinates differ in length");
  }
}

std::optional<std::size_t> FiniteSpace::find(const std::string& label) const {
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (points_[i].label == label) return i;
  return std::nullopt;
}

std::size_t FiniteSpace::index_of(const std::string& label) const {
  auto i = find(label);
  if (!i) throw Error(Errc::kUnknownPoint, "unknown point '" + label + "'");
  return *i;
}

bool FiniteSpace::operator==(const FiniteSpace& o) const {
  if (points_.size() != o.points_.size()) return false;
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (points_[i].label != o.points_[i].label || points_[i].coords != o.points_[i].coords) return false;
  return true;
}

std::vector<std::size_t> independent_subset(const std::vector<std::vector<double>>& tables, double rel) {
  if (tables.empty()) return {};
  CMatrix a(tables.front().size(), tables.size());
  for (std::size_t j = 0; j < tables.size(); ++j)
    for (std::size_t i = 0; i < tables[j].size(); ++i) a(i, j) = tables[j][i];
  return independent_columns(a, rel);
}

ScalarSpaceE::ScalarSpaceE(FiniteSpace space, std::vector<std::vector<double>> basis, bool contains_one)
    : space_(std::move(space)), basis_(std::move(basis)), contains_one_(contains_one) {
  std::size_t n = space_.size();
  CMatrix a(n, basis_.size());
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (basis_[i].size() != n) throw Error(Errc::kDimensionMismatch, "scalar table length differs from point count");
    for (std::size_t x = 0; x < n; ++x) a(x, i) = basis_[i][x];
  }
  if (!basis_.empty() && numerical_rank(a) != basis_.size())
    throw Error(Errc::kInvalidInput, "scalar basis tables are linearly dependent");
  if (contains_one_) {
    CMatrix ones(n, 1);
    for (std::size_t x = 0; x < n; ++x) ones(x, 0) = 1.0;
    CMatrix c = lstsq(a, ones);
    CMatrix r = a * c - ones;
    if (r.frobenius_norm() > 1e-10) throw Error(Errc::kInvalidInput, "constant 1 is not in the span of E");
    one_.resize(basis_.size());
    for (std::size_t i = 0; i < basis_.size(); ++i) one_[i] = c(i, 0).real();
  }
}

double ScalarSpaceE::evaluate(const std::vector<double>& c, std::size_t x) const {
  double s = 0;
  for (std::size_t i = 0; i < basis_.size(); ++i) s += c[i] * basis_[i][x];
  return s;
}

MatrixFunctionSpace::MatrixFunctionSpace(FiniteSpace space, std::size_t q, std::vector<std::vector<HermMat>> basis,
                                         std::optional<UnitElement> unit)
    : space_(std::move(space)), q_(q), basis_(std::move(basis)), unit_(std::move(unit)) {
  std::size_t n = space_.size(), qq = q_ * q_;
  constraint_ = RMatrix(basis_.size(), n * qq);
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (basis_[i].size() != n) throw Error(Errc::kDimensionMismatch, "basis table length differs from point count");
    for (std::size_t x = 0; x < n; ++x) {
      if (basis_[i][x].dim() != q_) throw Error(Errc::kDimensionMismatch, "basis value has wrong matrix size");
      std::vector<double> c = hjk_coords(basis_[i][x]);
      for (std::size_t k = 0; k < qq; ++k) constraint_(i, x * qq + k) = c[k];
    }
  }
  if (!basis_.empty() && numerical_rank(to_complex(constraint_)) != basis_.size())
    throw Error(Errc::kInvalidInput, "basis tables are linearly dependent");
  if (unit_) {
    if (unit_->coeffs.size() != basis_.size()) throw Error(Errc::kDimensionMismatch, "unit coefficient count");
    if (!(unit_->epsilon > 0)) throw Error(Errc::kInvalidInput, "unit element needs epsilon > 0");
    for (std::size_t x = 0; x < n; ++x) {
      HermMat e = evaluate(unit_->coeffs, x) - unit_->epsilon * HermMat::identity(q_);
      if (!psd_check(e, 1e-10))
        throw Error(Errc::kInvalidInput, "unit element is not >= epsilon I at point '" + space_.point(x).label + "'");
    }
  }
}

HermMat MatrixFunctionSpace::evaluate(const std::vector<double>& c, std::size_t x) const {
  if (c.size() != basis_.size()) throw Error(Errc::kDimensionMismatch, "coefficient count differs from dim");
  HermMat s(q_);
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (c[i] != 0.0) s += c[i] * basis_[i][x];
  return s;
}

std::vector<double> MatrixFunctionSpace::coefficients_of(const std::vector<HermMat>& table, double* residual) const {
  std::size_t n = space_.size(), qq = q_ * q_;
  if (table.size() != n) throw Error(Errc::kDimensionMismatch, "table length differs from point count");
  CMatrix at(n * qq, basis_.size());
  for (std::size_t i = 0; i < basis_.size(); ++i)
    for (std::size_t k = 0; k < n * qq; ++k) at(k, i) = constraint_(i, k);
  CMatrix t(n * qq, 1);
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<double> c = hjk_coords(table[x]);
    for (std::size_t k = 0; k < qq; ++k) t(x * qq + k, 0) = c[k];
  }
  CMatrix c = lstsq(at, t);
  if (residual) *residual = (at * c - t).frobenius_norm();
  std::vector<double> out(basis_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c(i, 0).real();
  return out;
}

MomentFunctional::MomentFunctional(std::shared_ptr<const MatrixFunctionSpace> d, std::vector<double> v)
    : domain(std::move(d)), values(std::move(v)) {
  if (domain && values.size() != domain->dim())
    throw Error(Errc::kDimensionMismatch, "functional value count differs from space dimension");
  for (double x : values)
    if (!std::isfinite(x)) throw Error(Errc::kInvalidInput, "non-finite functional value");
}

MomentFunctional::MomentFunctional(const MatrixFunctionSpace& d, std::vector<double> v)
    : MomentFunctional(std::make_shared<const MatrixFunctionSpace>(d), std::move(v)) {}

double MomentFunctional::norm() const {
  double s = 0;
  for (double x : values) s += x * x;
  return std::sqrt(s);
}

void AtomicMeasure::validate(double tol) const {
  std::set<std::string> seen;
  for (const auto& a : atoms) {
    if (!seen.insert(a.label).second) throw Error(Errc::kInvalidInput, "duplicate atom label '" + a.label + "'");
    if (a.mass.dim() != atoms.front().mass.dim()) throw Error(Errc::kDimensionMismatch, "atom masses differ in size");
    if (!psd_check(a.mass, tol)) throw Error(Errc::kInvalidInput, "mass at '" + a.label + "' is not PSD");
  }
}

MatrixFunctionSpace lift_scalar_space(const ScalarSpaceE& e, std::size_t q) {
  std::vector<HermMat> h = hjk_basis(q);
  std::size_t n = e.space().size();
  std::vector<std::vector<HermMat>> basis;
  for (std::size_t i = 0; i < e.dim(); ++i)
    for (std::size_t jk = 0; jk < q * q; ++jk) {
      std::vector<HermMat> t(n);
      for (std::size_t x = 0; x < n; ++x) t[x] = e.value(i, x) * h[jk];
      basis.push_back(std::move(t));
    }
  std::optional<UnitElement> unit;
  if (e.contains_one()) {
    UnitElement u;
    u.coeffs.assign(e.dim() * q * q, 0.0);
    for (std::size_t i = 0; i < e.dim(); ++i)
      for (std::size_t j = 0; j < q; ++j) u.coeffs[i * q * q + j * q + j] = e.one_coefficients()[i];
    u.epsilon = 1.0;
    unit = u;
  }
  MatrixFunctionSpace s(e.space(), q, std::move(basis), unit);
  s.set_lift_source(e);
  return s;
}

MomentFunctional functional_from_L(const MatrixMomentFunctional& l) {
  if (l.values.size() != l.domain.dim()) throw Error(Errc::kDimensionMismatch, "L value count differs from dim E");
  std::size_t q = l.q();
  auto space = std::make_shared<const MatrixFunctionSpace>(lift_scalar_space(l.domain, q));
  std::vector<double> v;
  v.reserve(l.domain.dim() * q * q);
  for (const auto& li : l.values) {
    std::vector<double> c = hjk_coords(li);
    v.insert(v.end(), c.begin(), c.end());
  }
  return MomentFunctional(space, std::move(v));
}

MatrixMomentFunctional recover_L(const MomentFunctional& lambda) {
  if (!lambda.domain || !lambda.domain->lift_source())
    throw Error(Errc::kNotALift, "functional domain is not a lifted scalar space");
  const ScalarSpaceE& e = *lambda.domain->lift_source();
  std::size_t q = lambda.domain->q();
  MatrixMomentFunctional l{e, {}};
  for (std::size_t i = 0; i < e.dim(); ++i) l.values.push_back(from_hjk_coords(q, &lambda.values[i * q * q]));
  return l;
}

double eval_functional(const MomentFunctional& lambda, const std::vector<double>& coeffs) {
  if (coeffs.size() != lambda.values.size()) throw Error(Errc::kDimensionMismatch, "coefficient count mismatch");
  double s = 0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * lambda.values[i];
  return s;
}

MomentFunctional functional_from_measure(std::shared_ptr<const MatrixFunctionSpace> space, const AtomicMeasure& nu) {
  std::vector<double> v(space->dim(), 0.0);
  for (const auto& a : nu.atoms) {
    std::size_t x = space->space().index_of(a.label);
    if (a.mass.dim() != space->q()) throw Error(Errc::kDimensionMismatch, "atom mass has wrong size");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += trace_inner(space->value(i, x), a.mass);
  }
  return MomentFunctional(std::move(space), std::move(v));
}

MomentFunctional functional_from_measure(const MatrixFunctionSpace& space, const AtomicMeasure& nu) {
  return functional_from_measure(std::make_shared<const MatrixFunctionSpace>(space), nu);
}

MatrixMomentFunctional matrix_functional_from_measure(const ScalarSpaceE& e, const AtomicMeasure& nu) {
  std::size_t q = nu.q();
  MatrixMomentFunctional l{e, std::vector<HermMat>(e.dim(), HermMat(q))};
  for (const auto& a : nu.atoms) {
    std::size_t x = e.space().index_of(a.label);
    for (std::size_t i = 0; i < e.dim(); ++i) l.values[i] += e.value(i, x) * a.mass;
  }
  return l;
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

AtomicMeasure richter_reduce(const MatrixFunctionSpace& space, const MomentFunctional& lambda, const AtomicMeasure& nu,
                             double tol) {
  MomentFunctional given = functional_from_measure(space, nu);
  double err = relative_error(given.values, lambda.values);
  if (err > tol) {
    std::ostringstream os;
    os << "measure does not represent the functional (relative error " << err << ")";
    throw Error(Errc::kNotRepresenting, os.str());
  }

  struct Piece {
    std::size_t point;
    CVector u;
    double w;
  };
  std::vector<Piece> pieces;
  double wmax = 0;
  for (const auto& a : nu.atoms) {
    EigenDecomp e = eig_herm(a.mass);
    for (double v : e.values) wmax = std::max(wmax, v);
  }
  for (const auto& a : nu.atoms) {
    std::size_t x = space.space().index_of(a.label);
    EigenDecomp e = eig_herm(a.mass);
    for (std::size_t r = 0; r < e.values.size(); ++r)
      if (e.values[r] > 1e-14 * wmax) pieces.push_back({x, e.vectors.column(r), e.values[r]});
  }

  std::size_t dim = space.dim();
  auto moment_vector = [&](const Piece& p) {
    HermMat uu = HermMat::outer(p.u);
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = trace_inner(space.value(i, p.point), uu);
    return v;
  };
  std::vector<std::vector<double>> vecs;
  for (const auto& p : pieces) vecs.push_back(moment_vector(p));

  while (!pieces.empty()) {
    CMatrix a(dim, pieces.size());
    for (std::size_t r = 0; r < pieces.size(); ++r)
      for (std::size_t i = 0; i < dim; ++i) a(i, r) = vecs[r][i];
    CMatrix ns = null_space(a);
    if (ns.cols() == 0) break;
    std::vector<double> z(pieces.size());
    for (std::size_t r = 0; r < z.size(); ++r) z[r] = ns(r, 0).real();
    if (*std::max_element(z.begin(), z.end()) <= 0)
      for (auto& v : z) v = -v;
    double step = std::numeric_limits<double>::infinity();
    std::size_t drop = 0;
    for (std::size_t r = 0; r < z.size(); ++r)
      if (z[r] > 0 && pieces[r].w / z[r] < step) {
        step = pieces[r].w / z[r];
        drop = r;
      }
    for (std::size_t r = 0; r < z.size(); ++r) pieces[r].w -= step * z[r];
    pieces[drop].w = 0;
    std::vector<Piece> kept;
    std::vector<std::vector<double>> kept_vecs;
    for (std::size_t r = 0; r < pieces.size(); ++r)
      if (pieces[r].w > 0) {
        kept.push_back(pieces[r]);
        kept_vecs.push_back(vecs[r]);
      }
    pieces = std::move(kept);
    vecs = std::move(kept_vecs);
  }

  std::map<std::size_t, HermMat> grouped;
  for (const auto& p : pieces) {
    auto it = grouped.find(p.point);
    if (it == grouped.end()) it = grouped.emplace(p.point, HermMat(space.q())).first;
    it->second += p.w * HermMat::outer(p.u);
  }
  AtomicMeasure out;
  for (auto& [x, m] : grouped) out.atoms.push_back({space.space().point(x).label, m, space.space().point(x).coords});

  MomentFunctional back = functional_from_measure(space, out);
  err = relative_error(back.values, lambda.values);
  if (err > tol) {
    std::ostringstream os;
    os << "reduction lost accuracy (relative error " << err << ")";
    throw Error(Errc::kResidualTooLarge, os.str());
  }
  return out;
}

}  // namespace matmoment
