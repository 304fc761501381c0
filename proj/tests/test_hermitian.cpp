#include <cmath>

#include "doctest.h"
#include "matmoment/error.hpp"
#include "matmoment/hermitian.hpp"
#include "matmoment/linalg.hpp"
#include "support.hpp"

using namespace matmoment;
using mmtest::Gen;

TEST_CASE("trace_inner examples") {
  CHECK(trace_inner(HermMat::identity(2), HermMat::identity(2)) == doctest::Approx(2.0));
  for (std::size_t q : {1u, 2u, 3u}) {
    auto basis = hjk_basis(q);
    for (std::size_t a = 0; a < basis.size(); ++a)
      for (std::size_t b = 0; b < basis.size(); ++b)
        CHECK(std::abs(trace_inner(basis[a], basis[b]) - (a == b ? 1.0 : 0.0)) <= 1e-12);
  }
  Gen g(1);
  for (int i = 0; i < 50; ++i) CHECK(trace_inner(g.psd(3), g.psd(3)) >= -1e-12);
  CHECK_THROWS_AS(trace_inner(HermMat::identity(2), HermMat::identity(3)), Error);
}

TEST_CASE("trace_inner is a real inner product") {
  Gen g(2);
  for (int t = 0; t < 20; ++t) {
    HermMat x = g.herm(3), y = g.herm(3), z = g.herm(3);
    double a = g.normal(), b = g.normal();
    CHECK(std::abs(trace_inner(x, y) - trace_inner(y, x)) <= 1e-12);
    CHECK(std::abs(trace_inner(a * x + b * y, z) - a * trace_inner(x, z) - b * trace_inner(y, z)) <= 1e-10);
    // Gram matrix of a random family is PSD.
    std::vector<HermMat> fam;
    for (int k = 0; k < 5; ++k) fam.push_back(g.herm(2));
    CMatrix gram(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) gram(i, j) = trace_inner(fam[i], fam[j]);
    CHECK(psd_check(HermMat::from_matrix(gram), 1e-10));
  }
}

TEST_CASE("H_jk expansion identity") {
  Gen g(3);
  for (std::size_t q = 1; q <= 4; ++q) {
    HermMat a = g.herm(q);
    HermMat back(q);
    for (const auto& h : hjk_basis(q)) back += trace_inner(a, h) * h;
    CHECK((back - a).frobenius_norm() <= 1e-12);
    CHECK((from_hjk_coords(q, hjk_coords(a)) - a).frobenius_norm() <= 1e-12);
  }
  // j < k is the real off-diagonal element, j > k the imaginary one.
  CHECK(hjk(2, 0, 1)(0, 1).real() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(std::abs(hjk(2, 1, 0)(0, 1).imag()) == doctest::Approx(1 / std::sqrt(2.0)));
}

TEST_CASE("hermiticity is validated") {
  CMatrix m(2, 2);
  m(0, 1) = 1;
  CHECK_THROWS_AS(HermMat::from_matrix(m), Error);
  m(1, 0) = 1.0 + 1e-13;
  CHECK_NOTHROW(HermMat::from_matrix(m));
  m(0, 0) = std::nan("");
  CHECK_THROWS_AS(HermMat::from_matrix(m), Error);
}

TEST_CASE("eig_herm examples") {
  EigenDecomp e = eig_herm(HermMat::diagonal({3, 1}));
  CHECK(e.values[0] == doctest::Approx(1));
  CHECK(e.values[1] == doctest::Approx(3));

  e = eig_herm(mmtest::herm2(0, 1, 0));
  CHECK(e.values[0] == doctest::Approx(-1));
  CHECK(e.values[1] == doctest::Approx(1));
  // (1, -1)/sqrt2 for -1, up to phase
  CHECK(std::abs(std::abs(e.vectors(0, 0)) - 1 / std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(e.vectors(0, 0) + e.vectors(1, 0)) <= 1e-12);
  CHECK(std::abs(e.vectors(0, 1) - e.vectors(1, 1)) <= 1e-12);

  Gen g(4);
  for (int t = 0; t < 20; ++t) {
    std::size_t q = g.integer(1, 5);
    CMatrix u = g.unitary(q);
    std::vector<double> lam(q);
    for (auto& l : lam) l = g.uniform(-5, 5);
    std::sort(lam.begin(), lam.end());
    CMatrix d(q, q);
    for (std::size_t i = 0; i < q; ++i) d(i, i) = lam[i];
    EigenDecomp r = eig_herm(HermMat::hermitian_part(u * d * u.adjoint()));
    for (std::size_t i = 0; i < q; ++i) CHECK(std::abs(r.values[i] - lam[i]) <= 1e-10);
  }
}

TEST_CASE("eig_herm reconstruction over random matrices") {
  Gen g(5);
  double worst_rec = 0, worst_orth = 0;
  for (int t = 0; t < 1000; ++t) {
    std::size_t q = 1 + t % 6;
    HermMat a = g.herm(q);
    EigenDecomp e = eig_herm(a);
    CMatrix d(q, q);
    for (std::size_t i = 0; i < q; ++i) d(i, i) = e.values[i];
    for (std::size_t i = 1; i < q; ++i) REQUIRE(e.values[i - 1] <= e.values[i]);
    double rec = (e.vectors * d * e.vectors.adjoint() - a.matrix()).frobenius_norm();
    worst_rec = std::max(worst_rec, rec / std::max(1.0, a.frobenius_norm()));
    worst_orth = std::max(worst_orth, (e.vectors.adjoint() * e.vectors - CMatrix::identity(q)).frobenius_norm());
  }
  CHECK(worst_rec <= 1e-10);
  CHECK(worst_orth <= 1e-10);
}

TEST_CASE("psd_check and psd_project") {
  CHECK(psd_check(HermMat::identity(3)));
  CHECK_FALSE(psd_check(HermMat::diagonal({1, -1})));
  Gen g(6);
  CHECK(psd_check(HermMat::outer(g.vec(3))));

  CHECK((psd_project(HermMat::diagonal({2, -3})) - HermMat::diagonal({2, 0})).frobenius_norm() <= 1e-12);
  HermMat p = g.psd(3);
  CHECK((psd_project(p) - p).frobenius_norm() <= 1e-12);
  CHECK((psd_project(mmtest::herm2(0, 1, 0)) - 0.5 * mmtest::herm2(1, 1, 1)).frobenius_norm() <= 1e-12);

  for (int t = 0; t < 10; ++t) {
    HermMat a = g.herm(3);
    HermMat proj = psd_project(a);
    CHECK(psd_check(proj, 1e-12));
    CHECK((psd_project(proj) - proj).frobenius_norm() <= 1e-10);
    for (int k = 0; k < 100; ++k) CHECK((proj - a).frobenius_norm() <= (g.psd(3, g.integer(1, 3)) - a).frobenius_norm() + 1e-9);
  }
}

TEST_CASE("loewner_geq") {
  CHECK(loewner_geq(2.0 * HermMat::identity(2), HermMat::identity(2)));
  CHECK_FALSE(loewner_geq(mmtest::a_eta(1), mmtest::a_eta(-1)));
  CHECK_FALSE(loewner_geq(mmtest::a_eta(-1), mmtest::a_eta(1)));
  Gen g(7);
  HermMat a = g.herm(3);
  CHECK(loewner_geq(a, a));
}

TEST_CASE("simultaneous_diagonalize") {
  SimultaneousDiag s = simultaneous_diagonalize({HermMat::diagonal({1, 2}), HermMat::diagonal({5, -1})});
  CHECK((s.unitary - CMatrix::identity(2)).frobenius_norm() <= 1e-12);

  s = simultaneous_diagonalize({mmtest::herm2(0, 1, 0), HermMat::identity(2)});
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(std::abs(std::abs(s.unitary(0, c)) - 1 / std::sqrt(2.0)) <= 1e-10);
    double lam = s.diagonals[0][c];
    CHECK(std::abs(std::abs(lam) - 1) <= 1e-10);
    // eigenvector of [[0,1],[1,0]] for lam
    CHECK(std::abs(s.unitary(1, c) - lam * s.unitary(0, c)) <= 1e-10);
    CHECK(s.diagonals[1][c] == doctest::Approx(1));
  }

  Gen g(8);
  for (int t = 0; t < 20; ++t) {
    HermMat a = g.herm(3);
    HermMat a2 = HermMat::hermitian_part(a.matrix() * a.matrix());
    s = simultaneous_diagonalize({a, a2});
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(s.diagonals[1][i] - s.diagonals[0][i] * s.diagonals[0][i]) <= 1e-8);
  }

  try {
    simultaneous_diagonalize({mmtest::herm2(0, 1, 0), HermMat::diagonal({1, -1})});
    FAIL("non-commuting family accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kCommutatorTooLarge);
  }
}

TEST_CASE("svd and least squares helpers") {
  Gen g(9);
  CMatrix a = g.cmatrix(5, 3);
  Svd d = svd(a);
  CMatrix s(d.s.size(), d.s.size());
  for (std::size_t i = 0; i < d.s.size(); ++i) s(i, i) = d.s[i];
  CHECK((d.u * s * d.v.adjoint() - a).frobenius_norm() <= 1e-10);
  CHECK(numerical_rank(a) == 3);
  CMatrix x = g.cmatrix(3, 2);
  CHECK((lstsq(a, a * x) - x).frobenius_norm() <= 1e-9);
  CMatrix low = g.cmatrix(4, 2) * g.cmatrix(2, 4);
  CMatrix n = null_space(low);
  CHECK(n.cols() == 2);
  CHECK((low * n).frobenius_norm() <= 1e-9);
}
