#include "matmoment/transport.hpp"

#include <random>

#include "matmoment/error.hpp"

namespace matmoment {

void PositiveMap::validate(std::uint64_t seed) const {
  if (kraus.empty()) throw Error(Errc::kInvalidInput, "map needs at least one Kraus factor");
  for (const auto& v : kraus)
    if (v.rows() != q || v.cols() != p) throw Error(Errc::kDimensionMismatch, "Kraus factor has wrong shape");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 10; ++t) {
    CMatrix g(q, q);
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = 0; j < q; ++j) g(i, j) = Complex(nd(rng), nd(rng));
    HermMat a = HermMat::hermitian_part(g * g.adjoint());
    if (!psd_check(apply(*this, a), 1e-10)) throw Error(Errc::kInvalidInput, "map does not preserve positivity");
  }
}

PositiveMap trace_map(std::size_t q) {
  PositiveMap phi{q, 1, {}, false};
  for (std::size_t j = 0; j < q; ++j) {
    CMatrix v(q, 1);
    v(j, 0) = 1.0;
    phi.kraus.push_back(v);
  }
  return phi;
}

PositiveMap compression_map(const CMatrix& basis) {
  CMatrix proj = basis * basis.adjoint();
  return PositiveMap{proj.rows(), proj.rows(), {proj}, false};
}

PositiveMap identity_map(std::size_t q) { return PositiveMap{q, q, {CMatrix::identity(q)}, false}; }

PositiveMap transpose_map(std::size_t q) { return PositiveMap{q, q, {CMatrix::identity(q)}, true}; }

CMatrix apply_general(const PositiveMap& phi, const CMatrix& a) {
  if (a.rows() != phi.q || a.cols() != phi.q) throw Error(Errc::kDimensionMismatch, "input has wrong size");
  CMatrix src = phi.transpose_first ? a.transpose() : a;
  CMatrix out(phi.p, phi.p);
  for (const auto& v : phi.kraus) out += v.adjoint() * src * v;
  return out;
}

HermMat apply(const PositiveMap& phi, const HermMat& a) { return HermMat::hermitian_part(apply_general(phi, a.matrix())); }

PositiveMap adjoint(const PositiveMap& phi) {
  PositiveMap out{phi.p, phi.q, {}, phi.transpose_first};
  for (const auto& v : phi.kraus) out.kraus.push_back(phi.transpose_first ? v.transpose() : v.adjoint());
  return out;
}

AtomicMeasure pushforward_measure(const PositiveMap& phi, const AtomicMeasure& mu) {
  AtomicMeasure out;
  for (const auto& a : mu.atoms) out.atoms.push_back({a.label, apply(phi, a.mass), a.coords});
  return out;
}

MatrixMomentFunctional transport_functional(const PositiveMap& phi, const MatrixMomentFunctional& l) {
  MatrixMomentFunctional out{l.domain, {}};
  for (const auto& v : l.values) out.values.push_back(apply(phi, v));
  return out;
}

std::vector<double> pullback_coefficients(const PositiveMap& phi, const std::vector<double>& coeffs) {
  std::size_t pp = phi.p * phi.p, qq = phi.q * phi.q;
  if (coeffs.size() % pp != 0) throw Error(Errc::kDimensionMismatch, "coefficient count is not a multiple of p^2");
  PositiveMap adj = adjoint(phi);
  std::vector<std::vector<double>> images;
  for (const auto& h : hjk_basis(phi.p)) images.push_back(hjk_coords(apply(adj, h)));
  std::size_t dim = coeffs.size() / pp;
  std::vector<double> out(dim * qq, 0.0);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t a = 0; a < pp; ++a)
      for (std::size_t b = 0; b < qq; ++b) out[i * qq + b] += coeffs[i * pp + a] * images[a][b];
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

CMatrix l_otimes(const MatrixMomentFunctional& l, std::size_t qf, const std::vector<double>& coeffs) {
  std::size_t qq = qf * qf, dim = l.values.size(), ql = l.q();
  if (coeffs.size() != dim * qq) throw Error(Errc::kDimensionMismatch, "coefficients do not match the lift");
  std::vector<HermMat> h = hjk_basis(qf);
  CMatrix out(qf * ql, qf * ql);
  for (std::size_t jk = 0; jk < qq; ++jk) {
    HermMat val(ql);
    for (std::size_t i = 0; i < dim; ++i) val += coeffs[i * qq + jk] * l.values[i];
    out += kron(h[jk].matrix(), val.matrix());
  }
  return out;
}

CMatrix id_tensor_apply(const PositiveMap& phi, std::size_t n, const CMatrix& x) {
  std::size_t q = phi.q, p = phi.p;
  if (x.rows() != n * q || x.cols() != n * q) throw Error(Errc::kDimensionMismatch, "tensor has wrong size");
  CMatrix out(n * p, n * p);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      CMatrix blk(q, q);
      for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) blk(i, j) = x(a * q + i, b * q + j);
      CMatrix img = apply_general(phi, blk);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) out(a * p + i, b * p + j) = img(i, j);
    }
  return out;
}

}  // namespace matmoment
