#include "matmoment/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "matmoment/error.hpp"

namespace matmoment {

namespace {

void require_same_shape(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(Errc::kDimensionMismatch, "matrix shapes differ");
}

// W = diag(1, e^{-i phi}) * [[c, s], [-s, c]] zeroes the (p,q) entry of W* A W.
struct Rotation {
  Complex wpp, wpq, wqp, wqq;
};

Rotation jacobi_rotation(double app, double aqq, Complex apq) {
  double r = std::abs(apq);
  Complex ph = apq / r;  // e^{i phi}
  double theta = (aqq - app) / (2.0 * r);
  double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  double c = 1.0 / std::sqrt(t * t + 1.0);
  double s = t * c;
  Complex em = std::conj(ph);
  return {c, s, -s * em, c * em};
}

void rotate_columns(CMatrix& m, std::size_t p, std::size_t q, const Rotation& w) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Complex a = m(i, p), b = m(i, q);
    m(i, p) = a * w.wpp + b * w.wqp;
    m(i, q) = a * w.wpq + b * w.wqq;
  }
}

void rotate_rows_adjoint(CMatrix& m, std::size_t p, std::size_t q, const Rotation& w) {
  Complex cpp = std::conj(w.wpp), cqp = std::conj(w.wqp), cpq = std::conj(w.wpq), cqq = std::conj(w.wqq);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    Complex a = m(p, j), b = m(q, j);
    m(p, j) = cpp * a + cqp * b;
    m(q, j) = cpq * a + cqq * b;
  }
}

}  // namespace

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

CMatrix CMatrix::transpose() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

CMatrix CMatrix::conj() const {
  CMatrix r = *this;
  for (auto& z : r.data_) z = std::conj(z);
  return r;
}

double CMatrix::frobenius_norm() const {
  double s = 0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

CVector CMatrix::column(std::size_t j) const {
  CVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void CMatrix::set_column(std::size_t j, const CVector& v) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

CMatrix CMatrix::columns(const std::vector<std::size_t>& idx) const {
  CMatrix r(rows_, idx.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < idx.size(); ++k) r(i, k) = (*this)(i, idx[k]);
  return r;
}

CMatrix CMatrix::rows_subset(const std::vector<std::size_t>& idx) const {
  CMatrix r(idx.size(), cols_);
  for (std::size_t k = 0; k < idx.size(); ++k)
    for (std::size_t j = 0; j < cols_; ++j) r(k, j) = (*this)(idx[k], j);
  return r;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(Complex s, CMatrix a) { return a *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw Error(Errc::kDimensionMismatch, "matrix product shapes");
  CMatrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      Complex aik = a(i, k);
      if (aik == Complex(0.0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

CVector operator*(const CMatrix& a, const CVector& v) {
  if (a.cols() != v.size()) throw Error(Errc::kDimensionMismatch, "matrix-vector shapes");
  CVector r(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex s = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

HermMat HermMat::from_matrix(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw Error(Errc::kDimensionMismatch, "Hermitian matrix must be square");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()) ||
          !std::isfinite(m(j, i).real()) || !std::isfinite(m(j, i).imag()))
        throw Error(Errc::kInvalidInput, "non-finite matrix entry");
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol)
        throw Error(Errc::kInvalidInput, "matrix is not Hermitian");
    }
  return hermitian_part(m);
}

HermMat HermMat::hermitian_part(const CMatrix& m) {
  if (m.rows() != m.cols()) throw Error(Errc::kDimensionMismatch, "Hermitian matrix must be square");
  HermMat h(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    h.m_(i, i) = m(i, i).real();
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      Complex z = 0.5 * (m(i, j) + std::conj(m(j, i)));
      h.m_(i, j) = z;
      h.m_(j, i) = std::conj(z);
    }
  }
  return h;
}

HermMat HermMat::identity(std::size_t q) {
  HermMat h(q);
  for (std::size_t i = 0; i < q; ++i) h.m_(i, i) = 1.0;
  return h;
}

HermMat HermMat::diagonal(const std::vector<double>& d) {
  HermMat h(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) h.m_(i, i) = d[i];
  return h;
}

HermMat HermMat::outer(const CVector& v) {
  HermMat h(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    h.m_(i, i) = std::norm(v[i]);
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      Complex z = v[i] * std::conj(v[j]);
      h.m_(i, j) = z;
      h.m_(j, i) = std::conj(z);
    }
  }
  return h;
}

double HermMat::trace() const {
  double t = 0;
  for (std::size_t i = 0; i < dim(); ++i) t += m_(i, i).real();
  return t;
}

HermMat& HermMat::operator+=(const HermMat& o) {
  m_ += o.m_;
  return *this;
}

HermMat& HermMat::operator-=(const HermMat& o) {
  m_ -= o.m_;
  return *this;
}

HermMat& HermMat::operator*=(double s) {
  m_ *= s;
  return *this;
}

HermMat operator+(HermMat a, const HermMat& b) { return a += b; }
HermMat operator-(HermMat a, const HermMat& b) { return a -= b; }
HermMat operator*(double s, HermMat a) { return a *= s; }
HermMat operator*(HermMat a, double s) { return a *= s; }

double trace_inner(const HermMat& x, const HermMat& y) {
  if (x.dim() != y.dim()) throw Error(Errc::kDimensionMismatch, "trace_inner dimensions differ");
  double s = 0;
  std::size_t q = x.dim();
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t k = 0; k < q; ++k) s += (x(j, k) * y(k, j)).real();
  return s;
}

HermMat hjk(std::size_t q, std::size_t j, std::size_t k) {
  if (j >= q || k >= q) throw Error(Errc::kInvalidInput, "H_jk index out of range");
  std::vector<double> c(q * q, 0.0);
  c[j * q + k] = 1.0;
  return from_hjk_coords(q, c);
}

std::vector<HermMat> hjk_basis(std::size_t q) {
  std::vector<HermMat> out;
  out.reserve(q * q);
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t k = 0; k < q; ++k) out.push_back(hjk(q, j, k));
  return out;
}

std::vector<double> hjk_coords(const HermMat& a) {
  const double r2 = std::sqrt(2.0);
  std::size_t q = a.dim();
  std::vector<double> c(q * q);
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t k = 0; k < q; ++k) {
      if (j == k)
        c[j * q + k] = a(j, j).real();
      else if (j < k)
        c[j * q + k] = r2 * a(j, k).real();
      else
        c[j * q + k] = r2 * a(j, k).imag();
    }
  return c;
}

HermMat from_hjk_coords(std::size_t q, const double* c) {
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix m(q, q);
  for (std::size_t j = 0; j < q; ++j) {
    m(j, j) = c[j * q + j];
    for (std::size_t k = j + 1; k < q; ++k) {
      Complex z(s * c[j * q + k], -s * c[k * q + j]);
      m(j, k) = z;
      m(k, j) = std::conj(z);
    }
  }
  return HermMat::hermitian_part(m);
}

HermMat from_hjk_coords(std::size_t q, const std::vector<double>& c) {
  if (c.size() != q * q) throw Error(Errc::kDimensionMismatch, "coordinate count must be q^2");
  return from_hjk_coords(q, c.data());
}

EigenDecomp eig_herm(const CMatrix& input, int max_sweeps) {
  std::size_t n = input.rows();
  if (n != input.cols()) throw Error(Errc::kDimensionMismatch, "eig_herm needs a square matrix");
  CMatrix a = input;
  CMatrix v = CMatrix::identity(n);
  double fro = a.frobenius_norm();
  auto off_norm = [&] {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };
  double off = off_norm();
  int sweep = 0;
  while (off > 1e-15 * fro && fro > 0) {
    if (sweep++ >= max_sweeps) {
      if (off <= 1e-12 * fro) break;
      std::ostringstream os;
      os << "Jacobi eigensolver did not converge, off-diagonal norm " << off;
      throw Error(Errc::kNotConverged, os.str());
    }
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        Complex apq = a(p, q);
        double app = a(p, p).real(), aqq = a(q, q).real();
        if (std::abs(apq) <= 1e-18 * (std::abs(app) + std::abs(aqq)) || std::abs(apq) == 0.0) continue;
        Rotation w = jacobi_rotation(app, aqq, apq);
        rotate_columns(a, p, q, w);
        rotate_rows_adjoint(a, p, q, w);
        a(p, q) = 0;
        a(q, p) = 0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        rotate_columns(v, p, q, w);
        rotated = true;
      }
    if (!rotated) break;
    off = off_norm();
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  EigenDecomp e;
  e.values.resize(n);
  e.vectors = CMatrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    e.values[r] = a(order[r], order[r]).real();
    for (std::size_t i = 0; i < n; ++i) e.vectors(i, r) = v(i, order[r]);
  }
  return e;
}

EigenDecomp eig_herm(const HermMat& a, int max_sweeps) { return eig_herm(a.matrix(), max_sweeps); }

double spectral_radius(const HermMat& a) {
  if (a.dim() == 0) return 0;
  EigenDecomp e = eig_herm(a);
  return std::max(std::abs(e.values.front()), std::abs(e.values.back()));
}

double min_eigenvalue(const HermMat& a) {
  if (a.dim() == 1) return a(0, 0).real();
  if (a.dim() == 2) {
    double p = a(0, 0).real(), r = a(1, 1).real();
    double h = 0.5 * (p - r);
    return 0.5 * (p + r) - std::sqrt(h * h + std::norm(a(0, 1)));
  }
  return eig_herm(a).values.front();
}

bool psd_check(const HermMat& a, double tol) {
  if (a.dim() == 0) return true;
  EigenDecomp e = eig_herm(a);
  double rho = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
  return e.values.front() >= -tol * std::max(1.0, rho);
}

HermMat psd_project(const HermMat& a) {
  if (a.dim() == 0) return a;
  EigenDecomp e = eig_herm(a);
  if (e.values.front() >= 0) return a;
  return spectral_map(a, [](double x) { return x > 0 ? x : 0.0; });
}

bool loewner_geq(const HermMat& a, const HermMat& b, double tol) { return psd_check(a - b, tol); }

double commutator_norm(const CMatrix& a, const CMatrix& b) { return (a * b - b * a).frobenius_norm(); }

SimultaneousDiag simultaneous_diagonalize(const std::vector<HermMat>& family, double tol) {
  SimultaneousDiag out;
  if (family.empty()) return out;
  std::size_t q = family.front().dim();
  double s = 0;
  for (const auto& a : family) {
    if (a.dim() != q) throw Error(Errc::kDimensionMismatch, "family members differ in dimension");
    s = std::max(s, a.frobenius_norm());
  }
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      double c = commutator_norm(family[i].matrix(), family[j].matrix());
      if (c > tol * s * s) {
        std::ostringstream os;
        os << "commutator of members " << i << " and " << j << " has norm " << c;
        throw Error(Errc::kCommutatorTooLarge, os.str());
      }
    }

  CMatrix u = CMatrix::identity(q);
  std::vector<std::vector<std::size_t>> groups{std::vector<std::size_t>(q)};
  std::iota(groups[0].begin(), groups[0].end(), 0);
  double cluster = std::max(1e-8, std::sqrt(tol) * 1e-2) * std::max(s, 1e-300);

  auto refine = [&](const CMatrix& a, bool split) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& g : groups) {
      if (g.size() == 1) {
        next.push_back(g);
        continue;
      }
      CMatrix ug = u.columns(g);
      CMatrix sub = ug.adjoint() * a * ug;
      EigenDecomp e = eig_herm(HermMat::hermitian_part(sub).matrix());
      CMatrix rot = ug * e.vectors;
      for (std::size_t c = 0; c < g.size(); ++c) u.set_column(g[c], rot.column(c));
      if (!split) {
        next.push_back(g);
        continue;
      }
      std::vector<std::size_t> cur{g[0]};
      for (std::size_t c = 1; c < g.size(); ++c) {
        if (e.values[c] - e.values[c - 1] > cluster) {
          next.push_back(cur);
          cur.clear();
        }
        cur.push_back(g[c]);
      }
      next.push_back(cur);
    }
    groups = std::move(next);
  };

  for (const auto& a : family) refine(a.matrix(), true);
  // Remaining clusters: polish with a generic combination so every member ends up diagonal.
  CMatrix comb(q, q);
  for (std::size_t i = 0; i < family.size(); ++i) comb += Complex(1.0 / (i + 1.37)) * family[i].matrix();
  refine(comb, false);

  out.unitary = u;
  for (const auto& a : family) {
    CMatrix d = u.adjoint() * a.matrix() * u;
    std::vector<double> diag(q);
    for (std::size_t i = 0; i < q; ++i) diag[i] = d(i, i).real();
    out.diagonals.push_back(diag);
  }
  return out;
}

}  // namespace matmoment
