#include "matmoment/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "matmoment/error.hpp"

namespace matmoment {

namespace {

Svd svd_tall(const CMatrix& a, int max_sweeps) {
  std::size_t m = a.rows(), n = a.cols();
  CMatrix w = a;
  CMatrix v = CMatrix::identity(n);
  std::vector<double> norms(n);
  auto col_norm2 = [&](std::size_t j) {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += std::norm(w(i, j));
    return s;
  };
  double total = 0;
  for (std::size_t j = 0; j < n; ++j) total += col_norm2(j);
  double floor2 = total * 1e-32;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0, beta = 0;
        Complex gamma = 0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += std::norm(w(i, p));
          beta += std::norm(w(i, q));
          gamma += std::conj(w(i, p)) * w(i, q);
        }
        double g = std::abs(gamma);
        if (g == 0.0 || alpha <= floor2 || beta <= floor2) continue;
        if (g <= 1e-15 * std::sqrt(alpha * beta)) continue;
        double r = g;
        Complex ph = gamma / r;
        double theta = (beta - alpha) / (2.0 * r);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        Complex em = std::conj(ph);
        Complex wpp = c, wpq = s, wqp = -s * em, wqq = c * em;
        for (std::size_t i = 0; i < m; ++i) {
          Complex x = w(i, p), y = w(i, q);
          w(i, p) = x * wpp + y * wqp;
          w(i, q) = x * wpq + y * wqq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          Complex x = v(i, p), y = v(i, q);
          v(i, p) = x * wpp + y * wqp;
          v(i, q) = x * wpq + y * wqq;
        }
        rotated = true;
      }
    if (!rotated) break;
  }
  for (std::size_t j = 0; j < n; ++j) norms[j] = std::sqrt(col_norm2(j));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });
  Svd out;
  out.s.resize(n);
  out.u = CMatrix(m, n);
  out.v = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t j = order[k];
    out.s[k] = norms[j];
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, j);
    if (norms[j] > 0)
      for (std::size_t i = 0; i < m; ++i) out.u(i, k) = w(i, j) / norms[j];
  }
  return out;
}

}  // namespace

Svd svd(const CMatrix& a, int max_sweeps) {
  if (a.rows() >= a.cols()) return svd_tall(a, max_sweeps);
  Svd t = svd_tall(a.adjoint(), max_sweeps);
  return {t.v, t.s, t.u};
}

double rank_cutoff(const Svd& d, std::size_t rows, std::size_t cols, double rel) {
  double smax = d.s.empty() ? 0.0 : d.s.front();
  return smax * static_cast<double>(std::max(rows, cols)) * rel;
}

std::size_t numerical_rank(const CMatrix& a, double rel) {
  Svd d = svd(a);
  double cut = rank_cutoff(d, a.rows(), a.cols(), rel);
  std::size_t r = 0;
  for (double s : d.s)
    if (s > cut) ++r;
  return r;
}

CMatrix lstsq(const CMatrix& a, const CMatrix& b, double rel) {
  if (a.rows() != b.rows()) throw Error(Errc::kDimensionMismatch, "lstsq row counts differ");
  Svd d = svd(a);
  double cut = rank_cutoff(d, a.rows(), a.cols(), rel);
  CMatrix utb = d.u.adjoint() * b;
  for (std::size_t k = 0; k < d.s.size(); ++k) {
    double inv = d.s[k] > cut ? 1.0 / d.s[k] : 0.0;
    for (std::size_t j = 0; j < utb.cols(); ++j) utb(k, j) *= inv;
  }
  return d.v * utb;
}

CMatrix pinv(const CMatrix& a, double rel) { return lstsq(a, CMatrix::identity(a.rows()), rel); }

CMatrix orthogonal_complement(const CMatrix& q) {
  std::size_t n = q.rows();
  std::vector<CVector> basis;
  for (std::size_t j = 0; j < q.cols(); ++j) basis.push_back(q.column(j));
  std::vector<CVector> extra;
  for (std::size_t i = 0; i < n && basis.size() < n; ++i) {
    CVector v(n, 0.0);
    v[i] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        Complex c = 0;
        for (std::size_t k = 0; k < n; ++k) c += std::conj(b[k]) * v[k];
        for (std::size_t k = 0; k < n; ++k) v[k] -= c * b[k];
      }
    double nv = 0;
    for (const auto& z : v) nv += std::norm(z);
    nv = std::sqrt(nv);
    if (nv < 1e-6) continue;
    for (auto& z : v) z /= nv;
    basis.push_back(v);
    extra.push_back(v);
  }
  CMatrix out(n, extra.size());
  for (std::size_t j = 0; j < extra.size(); ++j) out.set_column(j, extra[j]);
  return out;
}

CMatrix null_space(const CMatrix& a, double rel) {
  Svd d = svd(a);
  double cut = rank_cutoff(d, a.rows(), a.cols(), rel);
  std::vector<std::size_t> range;
  for (std::size_t k = 0; k < d.s.size(); ++k)
    if (d.s[k] > cut) range.push_back(k);
  return orthogonal_complement(d.v.columns(range));
}

CMatrix to_complex(const RMatrix& a) {
  CMatrix c(a.rows, a.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) c(i, j) = a(i, j);
  return c;
}

RMatrix real_part(const CMatrix& a) {
  RMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j).real();
  return r;
}

bool cholesky_solve(std::vector<double> a, std::size_t n, std::vector<double>& b) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0)) return false;
    d = std::sqrt(d);
    a[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
    b[i] = s / a[i * n + i];
  }
  return true;
}

std::vector<std::size_t> independent_columns(const CMatrix& a, double rel) {
  std::size_t m = a.rows();
  double scale = 0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += std::norm(a(i, j));
    scale = std::max(scale, std::sqrt(s));
  }
  std::vector<CVector> basis;
  std::vector<std::size_t> picked;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    CVector v = a.column(j);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        Complex c = 0;
        for (std::size_t k = 0; k < m; ++k) c += std::conj(b[k]) * v[k];
        for (std::size_t k = 0; k < m; ++k) v[k] -= c * b[k];
      }
    double nv = 0;
    for (const auto& z : v) nv += std::norm(z);
    nv = std::sqrt(nv);
    if (nv <= rel * std::max(scale, 1e-300) * static_cast<double>(std::max<std::size_t>(m, 1))) continue;
    for (auto& z : v) z /= nv;
    basis.push_back(v);
    picked.push_back(j);
  }
  return picked;
}

}  // namespace matmoment
