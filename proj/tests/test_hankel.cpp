#include <cmath>

#include "doctest.h"
#include "matmoment/error.hpp"
#include "matmoment/fixtures.hpp"
#include "matmoment/flat_extract.hpp"
#include "matmoment/hankel.hpp"
#include "support.hpp"

using namespace matmoment;
using mmtest::Gen;

namespace {

MomentSequence scalar_sequence(const std::vector<double>& s) {
  MomentSequence seq(1, 1, static_cast<int>(s.size()) - 1);
  for (std::size_t k = 0; k < s.size(); ++k) seq.set({static_cast<int>(k)}, HermMat::diagonal({s[k]}));
  return seq;
}

AtomicMeasure random_measure(Gen& g, std::size_t d, std::size_t q, int k) {
  AtomicMeasure nu;
  for (int j = 0; j < k; ++j) {
    std::vector<double> x(d);
    for (auto& c : x) c = g.uniform(-1, 1);
    nu.atoms.push_back({"a" + std::to_string(j), g.psd(q, g.integer(1, static_cast<int>(q))), x});
  }
  return nu;
}

}  // namespace

TEST_CASE("multi-index sets") {
  MultiIndexSet s(2, 2);
  CHECK(s.size() == 6);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i - 1] < s[i]);
  CHECK(MultiIndexSet(3, 4).size() == 35);
  CHECK(s.position(s[4]) == 4);
  CHECK_THROWS_AS(s.position({3, 0}), Error);
}

TEST_CASE("build_hankel examples") {
  BlockHankel h = build_hankel(scalar_sequence({1, 1, 1}), 1);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(h.flat(i, j).real() == doctest::Approx(1));

  MomentSequence origin = fixtures::hankel_delta({0.0}, HermMat::identity(2), 2);
  h = build_hankel(origin, 1);
  CHECK((HermMat::from_matrix(h.block(0, 0)) - HermMat::identity(2)).frobenius_norm() == 0.0);
  CHECK(h.block(0, 1).frobenius_norm() == 0.0);
  CHECK(h.block(1, 1).frobenius_norm() == 0.0);

  MomentSequence zero(2, 2, 4);
  CHECK(build_hankel(zero, 2).flat.frobenius_norm() == 0.0);
  CHECK_THROWS_AS(build_hankel(zero, 3), Error);
}

TEST_CASE("Hankel block structure") {
  Gen g(21);
  MomentSequence seq(2, 2, 4);
  for (const auto& a : seq.index().indices()) seq.set(a, g.herm(2));
  BlockHankel h = build_hankel(seq, 2);
  CHECK(h.flat.dim() == 2 * 6);
  for (std::size_t k = 0; k < h.index.size(); ++k)
    for (std::size_t l = 0; l < h.index.size(); ++l) {
      CHECK((h.block(k, l) - h.block(l, k).adjoint()).frobenius_norm() == 0.0);
      CHECK((h.block(k, l) - seq.at(add(h.index[k], h.index[l])).matrix()).frobenius_norm() == 0.0);
    }
}

TEST_CASE("quad_form examples") {
  Gen g(22);
  AtomicMeasure nu = random_measure(g, 2, 2, 3);
  MomentSequence seq = moments_from_measure(nu, 4);
  BlockHankel h = build_hankel(seq, 2);
  BlockVector e0(h.index.size(), CMatrix(2, 2));
  e0[0] = CMatrix::identity(2);
  CHECK(quad_form(h, e0, e0).real() == doctest::Approx(seq.at({0, 0}).trace()));

  for (int t = 0; t < 20; ++t) {
    BlockVector a, b;
    for (std::size_t k = 0; k < h.index.size(); ++k) {
      a.push_back(g.cmatrix(2, 2));
      b.push_back(g.cmatrix(2, 2));
    }
    // sum_j tr(A(x_j) B(x_j)* M_j)
    Complex direct = 0;
    for (const auto& atom : nu.atoms) {
      CMatrix ax(2, 2), bx(2, 2);
      for (std::size_t k = 0; k < h.index.size(); ++k) {
        ax += monomial(atom.coords, h.index[k]) * a[k];
        bx += monomial(atom.coords, h.index[k]) * b[k];
      }
      CMatrix p = ax * bx.adjoint() * atom.mass.matrix();
      direct += p(0, 0) + p(1, 1);
    }
    Complex got = quad_form(h, a, b);
    CHECK(std::abs(got - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
    CHECK(quad_form(h, a, a).real() >= -1e-10);
  }
  CHECK_THROWS_AS(quad_form(h, BlockVector(2, CMatrix(2, 2)), BlockVector(2, CMatrix(2, 2))), Error);
}

TEST_CASE("hankel_psd") {
  Gen g(23);
  for (int t = 0; t < 10; ++t) CHECK(hankel_psd(build_hankel(moments_from_measure(random_measure(g, 2, 2, 3), 4), 2)));
  CHECK_FALSE(hankel_psd(build_hankel(scalar_sequence({1, 0, -1}), 1)));
  CHECK(hankel_psd(build_hankel(MomentSequence(1, 2, 2), 1)));
}

TEST_CASE("numeric_rank") {
  CHECK(numeric_rank(HermMat::identity(3)) == 3);
  Gen g(24);
  CHECK(numeric_rank(HermMat::outer(g.vec(4))) == 1);
  CHECK(numeric_rank(build_hankel(scalar_sequence({1, 1, 1}), 1)) == 1);
}

TEST_CASE("is_flat") {
  Gen g(25);
  CVector u = g.vec(2);
  for (int m = 0; m <= 2; ++m) {
    MomentSequence seq = fixtures::hankel_delta({0.3, -0.4}, HermMat::outer(u), 2 * m + 2);
    CHECK(is_flat(seq, m).flat);
  }
  // three generic scalar atoms on the line: rank stabilises at 3
  AtomicMeasure nu;
  nu.atoms.push_back({"a", HermMat::diagonal({1.0}), {-0.8}});
  nu.atoms.push_back({"b", HermMat::diagonal({0.5}), {0.1}});
  nu.atoms.push_back({"c", HermMat::diagonal({2.0}), {0.9}});
  MomentSequence seq = moments_from_measure(nu, 8);
  CHECK_FALSE(is_flat(seq, 1).flat);
  FlatnessReport f = is_flat(seq, 2);
  CHECK(f.flat);
  CHECK(f.rank_m == 3);

  // moments of the uniform measure on [0, 1]: 1/(k+1)
  std::vector<double> s;
  for (int k = 0; k <= 6; ++k) s.push_back(1.0 / (k + 1));
  CHECK_FALSE(is_flat(scalar_sequence(s), 1).flat);
  CHECK_THROWS_AS(is_flat(scalar_sequence(s), 3), Error);
}

TEST_CASE("Lambda(AB*) equals the Hankel pairing on random sequences") {
  Gen g(26);
  for (int t = 0; t < 100; ++t) {
    std::size_t d = g.integer(1, 2), q = g.integer(1, 2);
    int n = g.integer(0, 2);
    MomentSequence seq(d, q, 2 * n);
    for (const auto& a : seq.index().indices()) seq.set(a, g.herm(q));
    BlockHankel h = build_hankel(seq, n);
    BlockVector a, b;
    for (std::size_t k = 0; k < h.index.size(); ++k) {
      a.push_back(g.cmatrix(q, q));
      b.push_back(g.cmatrix(q, q));
    }
    Complex direct = 0;
    double scale = 0;
    for (std::size_t k = 0; k < h.index.size(); ++k)
      for (std::size_t l = 0; l < h.index.size(); ++l) {
        CMatrix c = a[l] * b[k].adjoint();
        CMatrix p = c * seq.at(add(h.index[l], h.index[k])).matrix();
        for (std::size_t i = 0; i < q; ++i) direct += p(i, i);
        scale += c.frobenius_norm() * seq.at(add(h.index[l], h.index[k])).frobenius_norm();
      }
    CHECK(std::abs(quad_form(h, a, b) - direct) <= 1e-10 * scale);
  }
}
