#include "matmoment/apolar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "matmoment/error.hpp"

namespace matmoment {

namespace {

void homogeneous_rec(std::size_t d, int left, MultiIndex& cur, std::size_t pos, std::vector<MultiIndex>& out) {
  if (pos + 1 == d) {
    cur[pos] = left;
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= left; ++k) {
    cur[pos] = k;
    homogeneous_rec(d, left - k, cur, pos + 1, out);
  }
}

void same_shape(const MatHomPoly& a, const MatHomPoly& b) {
  if (a.d != b.d || a.m != b.m || a.q != b.q) throw Error(Errc::kDimensionMismatch, "polynomial shapes differ");
}

}  // namespace

std::vector<MultiIndex> homogeneous_indices(std::size_t d, int m) {
  if (d == 0) throw Error(Errc::kInvalidInput, "need at least one variable");
  if (m < 0) throw Error(Errc::kInvalidInput, "negative degree");
  std::vector<MultiIndex> out;
  MultiIndex cur(d, 0);
  homogeneous_rec(d, m, cur, 0, out);
  return out;
}

double factorial(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
  return static_cast<double>(f);
}

double multinomial(int m, const MultiIndex& alpha) {
  // Product of binomials keeps intermediate values integral and small.
  std::uint64_t out = 1;
  int acc = 0;
  for (int a : alpha) {
    for (int k = 1; k <= a; ++k) {
      ++acc;
      out = out * static_cast<std::uint64_t>(acc) / static_cast<std::uint64_t>(k);
    }
  }
  if (acc != m) throw Error(Errc::kInvalidInput, "multi-index has the wrong degree");
  return static_cast<double>(out);
}

MatHomPoly::MatHomPoly(std::size_t d_, int m_, std::size_t q_)
    : d(d_), m(m_), q(q_), index(homogeneous_indices(d_, m_)), coeffs(index.size(), HermMat(q_)) {}

std::size_t MatHomPoly::position(const MultiIndex& alpha) const {
  auto it = std::lower_bound(index.begin(), index.end(), alpha);
  if (it == index.end() || *it != alpha) throw Error(Errc::kInvalidInput, "multi-index not in the index set");
  return static_cast<std::size_t>(it - index.begin());
}

MatHomPoly& MatHomPoly::operator+=(const MatHomPoly& o) {
  same_shape(*this, o);
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
  return *this;
}

MatHomPoly operator*(double s, MatHomPoly p) {
  for (auto& c : p.coeffs) c = s * c;
  return p;
}

std::vector<HermMat> to_monomial(const MatHomPoly& p) {
  std::vector<HermMat> out;
  for (std::size_t i = 0; i < p.index.size(); ++i) out.push_back(multinomial(p.m, p.index[i]) * p.coeffs[i]);
  return out;
}

MatHomPoly from_monomial(std::size_t d, int m, std::size_t q, const std::vector<HermMat>& plain) {
  MatHomPoly p(d, m, q);
  if (plain.size() != p.index.size()) throw Error(Errc::kDimensionMismatch, "wrong number of coefficients");
  for (std::size_t i = 0; i < plain.size(); ++i) p.coeffs[i] = (1.0 / multinomial(m, p.index[i])) * plain[i];
  return p;
}

double apolar_product(const MatHomPoly& p, const MatHomPoly& s) {
  same_shape(p, s);
  double out = 0;
  for (std::size_t i = 0; i < p.index.size(); ++i)
    out += multinomial(p.m, p.index[i]) * trace_inner(p.coeffs[i], s.coeffs[i]);
  return out;
}

MatHomPoly power_form(const std::vector<double>& y, int m, const HermMat& c) {
  MatHomPoly p(y.size(), m, c.dim());
  for (std::size_t i = 0; i < p.index.size(); ++i) p.coeffs[i] = monomial(y, p.index[i]) * c;
  return p;
}

MatHomPoly monomial_probe(std::size_t d, int m, const MultiIndex& alpha, const HermMat& h) {
  MatHomPoly p(d, m, h.dim());
  p.at(alpha) = (1.0 / multinomial(m, alpha)) * h;
  return p;
}

double coefficient_recovery(const MatHomPoly& p, const MultiIndex& alpha, const HermMat& h) {
  return trace_inner(p.at(alpha), h);
}

HermMat evaluate(const MatHomPoly& p, const std::vector<double>& y) {
  if (y.size() != p.d) throw Error(Errc::kDimensionMismatch, "point has wrong dimension");
  HermMat out(p.q);
  for (std::size_t i = 0; i < p.index.size(); ++i)
    out += (multinomial(p.m, p.index[i]) * monomial(y, p.index[i])) * p.coeffs[i];
  return out;
}

MatHomPoly diff_apply(const MatHomPoly& r, const MatHomPoly& s) {
  if (r.d != s.d) throw Error(Errc::kDimensionMismatch, "variable counts differ");
  if (r.q != s.q) throw Error(Errc::kDimensionMismatch, "matrix sizes differ");
  if (r.m > s.m) throw Error(Errc::kInvalidInput, "operator degree exceeds polynomial degree");
  int k = s.m - r.m;
  MatHomPoly out(s.d, k, 1);
  std::vector<double> plain(out.index.size(), 0.0);
  for (std::size_t g = 0; g < r.index.size(); ++g) {
    const MultiIndex& gamma = r.index[g];
    double wr = multinomial(r.m, gamma);
    for (std::size_t b = 0; b < s.index.size(); ++b) {
      const MultiIndex& beta = s.index[b];
      MultiIndex delta(s.d);
      bool ok = true;
      // beta! / delta! as an exact falling-factorial product
      double fall = 1;
      for (std::size_t i = 0; i < s.d && ok; ++i) {
        delta[i] = beta[i] - gamma[i];
        if (delta[i] < 0) ok = false;
        for (int t = delta[i] + 1; t <= beta[i]; ++t) fall *= t;
      }
      if (!ok) continue;
      double inner = trace_inner(r.coeffs[g], s.coeffs[b]);
      if (inner == 0) continue;
      plain[out.position(delta)] += wr * multinomial(s.m, beta) * fall * inner;
    }
  }
  for (std::size_t i = 0; i < plain.size(); ++i)
    out.coeffs[i] = HermMat::diagonal({plain[i] / multinomial(k, out.index[i])});
  return out;
}

MatHomPoly laplacian(const MatHomPoly& p) {
  if (p.m < 2) return MatHomPoly(p.d, 0, p.q);
  MatHomPoly out(p.d, p.m - 2, p.q);
  std::vector<HermMat> plain = to_monomial(p);
  std::vector<HermMat> res(out.index.size(), HermMat(p.q));
  for (std::size_t b = 0; b < p.index.size(); ++b)
    for (std::size_t i = 0; i < p.d; ++i) {
      int bi = p.index[b][i];
      if (bi < 2) continue;
      MultiIndex delta = p.index[b];
      delta[i] -= 2;
      res[out.position(delta)] += static_cast<double>(bi * (bi - 1)) * plain[b];
    }
  return from_monomial(p.d, p.m - 2, p.q, res);
}

void ConeElement::validate(double tol) const {
  for (const auto& t : terms) {
    if (t.eta.size() != d) throw Error(Errc::kDimensionMismatch, "direction has wrong dimension");
    if (t.c.dim() != q) throw Error(Errc::kDimensionMismatch, "coefficient has wrong size");
    if (!psd_check(t.c, tol)) throw Error(Errc::kInvalidInput, "cone coefficient is not PSD");
  }
}

MatHomPoly ConeElement::polynomial() const {
  MatHomPoly p(d, m, q);
  for (const auto& t : terms) p += power_form(t.eta, m, t.c);
  return p;
}

AtomicMeasure ConeElement::measure() const {
  AtomicMeasure nu;
  for (std::size_t r = 0; r < terms.size(); ++r) nu.atoms.push_back({"eta" + std::to_string(r), terms[r].c, terms[r].eta});
  return nu;
}

double eval_functional(const PolyFunctional& lambda, const MatHomPoly& p) {
  if (lambda.d != p.d || lambda.m != p.m || lambda.q != p.q) throw Error(Errc::kDimensionMismatch, "shape mismatch");
  std::size_t qq = p.q * p.q;
  double out = 0;
  for (std::size_t i = 0; i < p.index.size(); ++i) {
    std::vector<double> c = hjk_coords(multinomial(p.m, p.index[i]) * p.coeffs[i]);
    for (std::size_t jk = 0; jk < qq; ++jk) out += c[jk] * lambda.values[i * qq + jk];
  }
  return out;
}

PolyFunctional poly_functional_from_measure(std::size_t d, int m, const AtomicMeasure& nu) {
  std::size_t q = nu.q();
  PolyFunctional out{d, m, q, {}};
  std::vector<MultiIndex> idx = homogeneous_indices(d, m);
  std::size_t qq = q * q;
  out.values.assign(idx.size() * qq, 0.0);
  for (const auto& a : nu.atoms) {
    if (a.coords.size() != d) throw Error(Errc::kMissingCoordinates, "atom lacks coordinates: " + a.label);
    std::vector<double> c = hjk_coords(a.mass);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      double mono = monomial(a.coords, idx[i]);
      for (std::size_t jk = 0; jk < qq; ++jk) out.values[i * qq + jk] += mono * c[jk];
    }
  }
  return out;
}

GammaResult gamma_functional(const ConeElement& f) {
  f.validate();
  GammaResult out;
  MatHomPoly poly = f.polynomial();
  std::size_t qq = f.q * f.q;
  std::vector<HermMat> h = hjk_basis(f.q);
  out.functional = PolyFunctional{f.d, f.m, f.q, std::vector<double>(poly.index.size() * qq, 0.0)};
  out.differential.assign(out.functional.values.size(), 0.0);
  out.measure = f.measure();
  PolyFunctional atomic = poly_functional_from_measure(f.d, f.m, out.measure);
  if (f.terms.empty()) atomic.values.assign(out.functional.values.size(), 0.0);
  out.atomic = atomic.values;
  double mf = factorial(f.m);
  double scale = 0;
  for (std::size_t i = 0; i < poly.index.size(); ++i)
    for (std::size_t jk = 0; jk < qq; ++jk) {
      MatHomPoly probe = monomial_probe(f.d, f.m, poly.index[i], h[jk]);
      std::size_t k = i * qq + jk;
      out.functional.values[k] = apolar_product(probe, poly);
      out.differential[k] = diff_apply(probe, poly).coeffs[0](0, 0).real() / mf;
      scale = std::max(scale, std::abs(out.atomic[k]));
    }
  for (std::size_t k = 0; k < out.atomic.size(); ++k) {
    double e = std::max(std::abs(out.functional.values[k] - out.differential[k]),
                        std::abs(out.functional.values[k] - out.atomic[k]));
    out.max_discrepancy = std::max(out.max_discrepancy, e / std::max(scale, 1.0));
  }
  return out;
}

ConeElement functional_to_cone(const PolyFunctional& lambda, const std::optional<AtomicMeasure>& nu, double tol) {
  if (!nu) throw Error(Errc::kNoMeasureProvided, "a representing measure is required");
  ConeElement f{lambda.d, lambda.m, lambda.q, {}};
  for (const auto& a : nu->atoms) {
    if (a.coords.size() != lambda.d) throw Error(Errc::kMissingCoordinates, "atom lacks coordinates: " + a.label);
    if (a.mass.dim() != lambda.q) throw Error(Errc::kDimensionMismatch, "mass has wrong size");
    f.terms.push_back({a.coords, a.mass});
  }
  std::vector<double> back = poly_functional_from_measure(lambda.d, lambda.m, *nu).values;
  if (nu->atoms.empty()) back.assign(lambda.values.size(), 0.0);
  double num = 0, den = 0;
  for (std::size_t k = 0; k < back.size(); ++k) {
    num += (back[k] - lambda.values[k]) * (back[k] - lambda.values[k]);
    den += lambda.values[k] * lambda.values[k];
  }
  if (std::sqrt(num) > tol * std::max(std::sqrt(den), 1e-300) && num > 0)
    throw Error(Errc::kNotRepresenting, "measure does not represent the functional");
  return f;
}

MatHomPoly norm_power(std::size_t d, int n, const HermMat& c) {
  MatHomPoly out(d, 2 * n, c.dim());
  for (const MultiIndex& beta : homogeneous_indices(d, n)) {
    MultiIndex alpha(beta);
    for (int& a : alpha) a *= 2;
    out.at(alpha) = (multinomial(n, beta) / multinomial(2 * n, alpha)) * c;
  }
  return out;
}

std::vector<ConeTerm> norm_power_decomposition(std::size_t d, int n) {
  std::vector<std::vector<double>> dirs;
  const double pi = std::acos(-1.0);
  if (n < 0) throw Error(Errc::kInvalidInput, "negative degree");
  if (d == 1 || n == 0) {
    std::vector<double> e(d, 0.0);
    e[0] = 1;
    dirs.push_back(e);
  } else if (d == 2) {
    for (int k = 0; k <= n; ++k) dirs.push_back({std::cos(k * pi / (n + 1)), std::sin(k * pi / (n + 1))});
  } else if (d == 3 && n == 1) {
    dirs = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  } else if (d == 3 && n == 2) {
    const double phi = (1 + std::sqrt(5.0)) / 2, s = 1 / std::sqrt(1 + phi * phi);
    dirs = {{0, s, phi * s}, {0, -s, phi * s}, {s, phi * s, 0}, {-s, phi * s, 0}, {phi * s, 0, s}, {phi * s, 0, -s}};
  } else {
    throw Error(Errc::kInvalidInput, "no decomposition of ||x||^{2n} available for this (d, n)");
  }
  // Equal weights fixed by matching at e_1, then the whole identity is checked.
  double at_e1 = 0;
  for (const auto& e : dirs) at_e1 += std::pow(e[0], 2 * n);
  double w = 1.0 / at_e1;
  std::vector<ConeTerm> out;
  HermMat one = HermMat::identity(1);
  MatHomPoly sum(d, 2 * n, 1);
  for (const auto& e : dirs) {
    out.push_back({e, w * one});
    sum += power_form(e, 2 * n, w * one);
  }
  MatHomPoly target = norm_power(d, n, one);
  for (std::size_t i = 0; i < sum.coeffs.size(); ++i)
    if (std::abs(sum.coeffs[i](0, 0).real() - target.coeffs[i](0, 0).real()) > 1e-12)
      throw Error(Errc::kResidualTooLarge, "power-sum decomposition of ||x||^{2n} failed");
  return out;
}

}  // namespace matmoment
