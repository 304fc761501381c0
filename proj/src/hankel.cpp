#include "matmoment/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "matmoment/error.hpp"
#include "matmoment/kernels.hpp"

namespace matmoment {

namespace {

void enumerate(std::size_t d, int n, MultiIndex& cur, std::size_t pos, int used, std::vector<MultiIndex>& out) {
  if (pos == d) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e + used <= n; ++e) {
    cur[pos] = e;
    enumerate(d, n, cur, pos + 1, used + e, out);
  }
  cur[pos] = 0;
}

}  // namespace

MultiIndexSet::MultiIndexSet(std::size_t d, int n) : d_(d), n_(n) {
  if (n < 0) throw Error(Errc::kInvalidInput, "negative degree bound");
  MultiIndex cur(d, 0);
  enumerate(d, n, cur, 0, 0, indices_);
  for (std::size_t i = 0; i < indices_.size(); ++i) lookup_[indices_[i]] = i;
}

std::size_t MultiIndexSet::position(const MultiIndex& alpha) const {
  auto it = lookup_.find(alpha);
  if (it == lookup_.end()) throw Error(Errc::kInvalidInput, "multi-index outside the index set");
  return it->second;
}

int degree(const MultiIndex& a) {
  int s = 0;
  for (int e : a) s += e;
  return s;
}

MultiIndex add(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

double monomial(const std::vector<double>& x, const MultiIndex& alpha) {
  double v = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    for (int e = 0; e < alpha[i]; ++e) v *= x[i];
  return v;
}

MomentSequence::MomentSequence(std::size_t d, std::size_t q, int degree)
    : q_(q), index_(d, degree), moments_(index_.size(), HermMat(q)) {}

MomentSequence::MomentSequence(std::size_t d, std::size_t q, int degree, std::vector<HermMat> moments)
    : q_(q), index_(d, degree), moments_(std::move(moments)) {
  if (moments_.size() != index_.size()) throw Error(Errc::kDimensionMismatch, "moment count differs from |I(d,N)|");
  for (const auto& s : moments_)
    if (s.dim() != q_) throw Error(Errc::kDimensionMismatch, "moment has wrong matrix size");
}

void MomentSequence::set(const MultiIndex& alpha, const HermMat& s) {
  if (s.dim() != q_) throw Error(Errc::kDimensionMismatch, "moment has wrong matrix size");
  moments_[index_.position(alpha)] = s;
}

CMatrix BlockHankel::block(std::size_t k, std::size_t l) const {
  CMatrix b(q, q);
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t c = 0; c < q; ++c) b(a, c) = flat(k * q + a, l * q + c);
  return b;
}

BlockHankel build_hankel(const MomentSequence& seq, int n) {
  if (2 * n > seq.degree()) {
    std::ostringstream os;
    os << "H_" << n << " needs moments up to degree " << 2 * n << ", sequence has " << seq.degree();
    throw Error(Errc::kInsufficientDegree, os.str());
  }
  BlockHankel h;
  h.n = n;
  h.q = seq.q();
  h.index = MultiIndexSet(seq.d(), n);
  std::size_t nb = h.index.size();
  std::vector<std::size_t> slot(nb * nb);
  for (std::size_t k = 0; k < nb; ++k)
    for (std::size_t l = 0; l < nb; ++l) slot[k * nb + l] = seq.index().position(add(h.index[k], h.index[l]));
  h.flat = HermMat::hermitian_part(kernels::flatten_blocks(seq.moments(), slot, nb, seq.q()));
  return h;
}

Complex quad_form(const BlockHankel& h, const BlockVector& a, const BlockVector& b) {
  std::size_t nb = h.index.size();
  if (a.size() != nb || b.size() != nb) throw Error(Errc::kDimensionMismatch, "block vector length differs from |I(d,n)|");
  for (std::size_t k = 0; k < nb; ++k)
    if (a[k].rows() != h.q || a[k].cols() != h.q || b[k].rows() != h.q || b[k].cols() != h.q)
      throw Error(Errc::kDimensionMismatch, "block vector entries must be q x q");
  Complex s = 0;
  for (std::size_t k = 0; k < nb; ++k)
    for (std::size_t l = 0; l < nb; ++l) {
      CMatrix m = b[k].adjoint() * h.block(k, l) * a[l];
      for (std::size_t i = 0; i < h.q; ++i) s += m(i, i);
    }
  return s;
}

bool hankel_psd(const BlockHankel& h, double tol) { return psd_check(h.flat, tol); }

namespace {

std::size_t count_above(const std::vector<double>& ev, double threshold) {
  std::size_t r = 0;
  for (double v : ev)
    if (std::abs(v) > threshold) ++r;
  return r;
}

double max_abs(const std::vector<double>& ev) {
  double m = 0;
  for (double v : ev) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

std::size_t numeric_rank(const HermMat& h, double tol) {
  if (h.dim() == 0) return 0;
  EigenDecomp e = eig_herm(h);
  double lmax = max_abs(e.values);
  if (lmax == 0) return 0;
  return count_above(e.values, tol * lmax * static_cast<double>(h.dim()));
}

std::size_t numeric_rank(const BlockHankel& h, double tol) { return numeric_rank(h.flat, tol); }

FlatnessReport is_flat(const MomentSequence& seq, int m, double tol) {
  BlockHankel h1 = build_hankel(seq, m + 1);
  BlockHankel h0 = build_hankel(seq, m);
  FlatnessReport r;
  EigenDecomp e1 = eig_herm(h1.flat);
  EigenDecomp e0 = eig_herm(h0.flat);
  double lmax = max_abs(e1.values);
  double rho = std::max(lmax, 1.0);
  r.positive = e1.values.front() >= -1e-9 * rho;
  double threshold = tol * lmax * static_cast<double>(h1.flat.dim());
  r.rank_m1 = lmax == 0 ? 0 : count_above(e1.values, threshold);
  r.rank_m = lmax == 0 ? 0 : count_above(e0.values, threshold);
  r.flat = r.positive && r.rank_m == r.rank_m1;
  return r;
}

}  // namespace matmoment
