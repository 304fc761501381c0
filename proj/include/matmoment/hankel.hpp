#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "matmoment/hermitian.hpp"

namespace matmoment {

using MultiIndex = std::vector<int>;

// All alpha in N_0^d with |alpha| <= n, in lexicographic tuple order.
class MultiIndexSet {
 public:
  MultiIndexSet() = default;
  MultiIndexSet(std::size_t d, int n);

  std::size_t d() const { return d_; }
  int n() const { return n_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  // Throws InvalidInput when alpha is not in the set.
  std::size_t position(const MultiIndex& alpha) const;
  bool contains(const MultiIndex& alpha) const { return lookup_.count(alpha) > 0; }

 private:
  std::size_t d_ = 0;
  int n_ = 0;
  std::vector<MultiIndex> indices_;
  std::map<MultiIndex, std::size_t> lookup_;
};

int degree(const MultiIndex& a);
MultiIndex add(const MultiIndex& a, const MultiIndex& b);
double monomial(const std::vector<double>& x, const MultiIndex& alpha);

class MomentSequence {
 public:
  MomentSequence() = default;
  // Zero sequence.
  MomentSequence(std::size_t d, std::size_t q, int degree);
  MomentSequence(std::size_t d, std::size_t q, int degree, std::vector<HermMat> moments);

  std::size_t d() const { return index_.d(); }
  std::size_t q() const { return q_; }
  int degree() const { return index_.n(); }
  const MultiIndexSet& index() const { return index_; }
  const HermMat& at(const MultiIndex& alpha) const { return moments_[index_.position(alpha)]; }
  void set(const MultiIndex& alpha, const HermMat& s);
  const std::vector<HermMat>& moments() const { return moments_; }

 private:
  std::size_t q_ = 0;
  MultiIndexSet index_;
  std::vector<HermMat> moments_;
};

struct BlockHankel {
  int n = 0;
  std::size_t q = 0;
  MultiIndexSet index;  // I(d, n)
  HermMat flat;         // size q * |I(d, n)|
  CMatrix block(std::size_t k, std::size_t l) const;
};

BlockHankel build_hankel(const MomentSequence& seq, int n);

// Block coefficient vector indexed by I(d, n), general complex q x q entries.
using BlockVector = std::vector<CMatrix>;

// tr(B* H A) for block column vectors A, B.
Complex quad_form(const BlockHankel& h, const BlockVector& a, const BlockVector& b);

bool hankel_psd(const BlockHankel& h, double tol = 1e-9);
// Eigenvalues with |lambda| > tol * max|lambda| * dim.
std::size_t numeric_rank(const HermMat& h, double tol = 1e-8);
std::size_t numeric_rank(const BlockHankel& h, double tol = 1e-8);

struct FlatnessReport {
  bool flat = false;
  bool positive = false;
  std::size_t rank_m = 0;
  std::size_t rank_m1 = 0;
};

FlatnessReport is_flat(const MomentSequence& seq, int m, double tol = 1e-8);

}  // namespace matmoment
