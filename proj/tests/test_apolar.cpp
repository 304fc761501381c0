#include <cmath>

#include "doctest.h"
#include "matmoment/apolar.hpp"
#include "matmoment/error.hpp"
#include "support.hpp"

using namespace matmoment;
using mmtest::Gen;

namespace {

MatHomPoly random_poly(Gen& g, std::size_t d, int m, std::size_t q) {
  MatHomPoly p(d, m, q);
  for (auto& c : p.coeffs) c = g.herm(q);
  return p;
}

double scalar(const MatHomPoly& p) { return p.coeffs[0](0, 0).real(); }

HermMat one(double v) { return HermMat::diagonal({v}); }

}  // namespace

TEST_CASE("index sets and counts") {
  auto idx = homogeneous_indices(2, 2);
  REQUIRE(idx.size() == 3);
  CHECK(idx[0] == MultiIndex{0, 2});
  CHECK(idx[2] == MultiIndex{2, 0});
  CHECK(multinomial(4, {2, 1, 1}) == 12);
  CHECK(factorial(5) == 120);
  for (std::size_t d = 1; d <= 3; ++d)
    for (int m = 0; m <= 4; ++m)
      for (std::size_t q = 1; q <= 2; ++q) {
        MatHomPoly p(d, m, q);
        double expect = std::tgamma(m + d) / (std::tgamma(m + 1) * std::tgamma(d)) * q * q;
        CHECK(static_cast<double>(p.index.size() * q * q) == doctest::Approx(expect));
      }
  CHECK_THROWS_AS(multinomial(3, {1, 1}), Error);
}

TEST_CASE("apolar_product examples") {
  MatHomPoly a = power_form({1, 1}, 2, one(1));
  CHECK(apolar_product(a, a) == doctest::Approx(4));

  MatHomPoly p(2, 2, 2);
  p.at({2, 0}) = hjk_basis(2)[0];
  CHECK(apolar_product(p, p) == doctest::Approx(1));

  Gen g(81);
  HermMat c1 = g.herm(2), c2 = g.herm(2);
  CHECK(std::abs(apolar_product(power_form({1, 2}, 3, c1), power_form({-2, 1}, 3, c2))) <= 1e-12);

  CHECK_THROWS_AS(apolar_product(MatHomPoly(2, 2, 1), MatHomPoly(2, 3, 1)), Error);
}

TEST_CASE("power_form examples") {
  MatHomPoly p = power_form({1, 0, 0}, 3, HermMat::identity(2));
  for (std::size_t i = 0; i < p.index.size(); ++i) {
    bool top = p.index[i] == MultiIndex{3, 0, 0};
    CHECK(p.coeffs[i].frobenius_norm() == (top ? doctest::Approx(std::sqrt(2.0)) : doctest::Approx(0)));
  }
  MatHomPoly zero = power_form({0, 0}, 2, HermMat::identity(1));
  for (const auto& c : zero.coeffs) CHECK(c.frobenius_norm() == 0.0);

  std::vector<HermMat> plain = to_monomial(power_form({1, 1}, 2, one(1)));
  // order (0,2), (1,1), (2,0)
  CHECK(plain[0](0, 0).real() == 1);
  CHECK(plain[1](0, 0).real() == 2);
  CHECK(plain[2](0, 0).real() == 1);
  CHECK(from_monomial(2, 2, 1, plain) == power_form({1, 1}, 2, one(1)));
}

TEST_CASE("coefficient_recovery") {
  Gen g(82);
  HermMat c = g.herm(2), h = g.herm(2);
  std::vector<double> y{0.5, -1.5};
  MatHomPoly pf = power_form(y, 3, c);
  CHECK(coefficient_recovery(pf, {1, 2}, h) == doctest::Approx(0.5 * 1.5 * 1.5 * trace_inner(c, h)));

  MatHomPoly p = random_poly(g, 3, 2, 2);
  auto basis = hjk_basis(2);
  for (std::size_t i = 0; i < p.index.size(); ++i) {
    std::vector<double> coords(4);
    for (std::size_t jk = 0; jk < 4; ++jk) coords[jk] = coefficient_recovery(p, p.index[i], basis[jk]);
    CHECK((from_hjk_coords(2, coords) - p.coeffs[i]).frobenius_norm() <= 1e-12);
  }
  CVector v = g.vec(2);
  HermMat vv = HermMat::outer(v);
  Complex quad = 0;
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k) quad += std::conj(v[j]) * p.coeffs[1](j, k) * v[k];
  CHECK(coefficient_recovery(p, p.index[1], vv) == doctest::Approx(quad.real()));
  CHECK_THROWS_AS(coefficient_recovery(p, {1, 1}, vv), Error);
}

TEST_CASE("evaluate and the reproducing identity") {
  Gen g(83);
  HermMat c = g.herm(2);
  std::vector<double> a{0.3, -0.7}, y{1.1, 0.4};
  double ay = a[0] * y[0] + a[1] * y[1];
  CHECK((evaluate(power_form(a, 3, c), y) - std::pow(ay, 3) * c).frobenius_norm() <= 1e-12);
  CHECK(evaluate(random_poly(g, 2, 2, 2), {0, 0}).frobenius_norm() == 0.0);

  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    std::size_t d = g.integer(1, 3), q = g.integer(1, 2);
    int m = g.integer(0, 4);
    MatHomPoly p = random_poly(g, d, m, q);
    std::vector<double> pt(d);
    for (auto& x : pt) x = g.normal();
    HermMat b = g.herm(q);
    double lhs = trace_inner(evaluate(p, pt), b), rhs = apolar_product(p, power_form(pt, m, b));
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("diff_apply") {
  MatHomPoly x1sq(2, 2, 1);
  x1sq.at({2, 0}) = one(1);
  MatHomPoly r = diff_apply(x1sq, power_form({3, 0}, 2, one(1)));
  CHECK(r.m == 0);
  CHECK(scalar(r) == doctest::Approx(18));

  // <P(y), B> = 0 kills the result
  Gen g(84);
  MatHomPoly p(2, 2, 2);
  p.at({2, 0}) = HermMat::diagonal({1, 0});
  HermMat b = HermMat::diagonal({0, 1});
  MatHomPoly z = diff_apply(p, power_form({1.3, 0.2}, 4, b));
  for (const auto& c : z.coeffs) CHECK(std::abs(c(0, 0).real()) <= 1e-12);

  double worst = 0;
  for (int t = 0; t < 500; ++t) {
    std::size_t d = g.integer(1, 3), q = g.integer(1, 2);
    int m = g.integer(0, 4);
    MatHomPoly a = random_poly(g, d, m, q), s = random_poly(g, d, m, q);
    double ap = apolar_product(a, s), mf = factorial(m);
    double sc = std::max(1.0, std::abs(ap));
    worst = std::max({worst, std::abs(scalar(diff_apply(a, s)) / mf - ap) / sc,
                      std::abs(scalar(diff_apply(s, a)) / mf - ap) / sc});
  }
  CHECK(worst <= 1e-8);

  // lower-order operator on a cone element
  HermMat c = g.psd(2);
  std::vector<double> eta{0.7, -0.2};
  MatHomPoly op = random_poly(g, 2, 1, 2);
  MatHomPoly res = diff_apply(op, power_form(eta, 3, c));
  MatHomPoly want = (3.0 * trace_inner(evaluate(op, eta), c)) * power_form(eta, 2, one(1));
  for (std::size_t i = 0; i < res.coeffs.size(); ++i)
    CHECK(std::abs(res.coeffs[i](0, 0).real() - want.coeffs[i](0, 0).real()) <= 1e-10);

  CHECK_THROWS_AS(diff_apply(MatHomPoly(2, 3, 1), MatHomPoly(2, 2, 1)), Error);
}

TEST_CASE("Gram matrices are positive definite") {
  Gen g(85);
  for (int t = 0; t < 20; ++t) {
    std::size_t d = g.integer(1, 3), q = g.integer(1, 2);
    int m = g.integer(0, 3);
    std::vector<MatHomPoly> fam;
    for (int i = 0; i < 5; ++i) fam.push_back(random_poly(g, d, m, q));
    CMatrix gram(fam.size(), fam.size());
    for (std::size_t i = 0; i < fam.size(); ++i)
      for (std::size_t j = 0; j < fam.size(); ++j) {
        gram(i, j) = apolar_product(fam[i], fam[j]);
        CHECK(gram(i, j).real() == doctest::Approx(apolar_product(fam[j], fam[i])));
      }
    for (std::size_t i = 0; i < fam.size(); ++i) CHECK(gram(i, i).real() > 1e-10);
    auto ev = eig_herm(gram).values;
    CHECK(ev.front() >= -1e-10 * ev.back());
  }
}

TEST_CASE("gamma_functional") {
  ConeElement zero{2, 2, 2, {{{0.0, 0.0}, HermMat(2)}}};
  GammaResult z = gamma_functional(zero);
  for (double v : z.functional.values) CHECK(v == 0.0);

  ConeElement empty{2, 3, 1, {}};
  for (double v : gamma_functional(empty).functional.values) CHECK(v == 0.0);

  // F = I ||x||^2 in two variables
  ConeElement lap{2, 2, 2, {}};
  for (const auto& t : norm_power_decomposition(2, 1)) lap.terms.push_back({t.eta, t.c(0, 0).real() * HermMat::identity(2)});
  GammaResult gl = gamma_functional(lap);
  Gen g(86);
  HermMat h = g.herm(2);
  MatHomPoly probe = monomial_probe(2, 2, {2, 0}, h);
  CHECK(eval_functional(gl.functional, probe) == doctest::Approx(h.trace()));

  for (int t = 0; t < 20; ++t) {
    std::size_t d = g.integer(1, 3), q = g.integer(1, 2);
    ConeElement f{d, g.integer(0, 4), q, {}};
    for (int r = g.integer(1, 3); r > 0; --r) {
      std::vector<double> eta(d);
      for (auto& x : eta) x = g.normal();
      f.terms.push_back({eta, g.psd(q, g.integer(1, q))});
    }
    GammaResult gr = gamma_functional(f);
    CHECK(gr.max_discrepancy <= 1e-9);
    MatHomPoly p = random_poly(g, d, f.m, q);
    CHECK(eval_functional(gr.functional, p) == doctest::Approx(apolar_product(p, f.polynomial())));
  }

  ConeElement bad{1, 2, 1, {{{1.0}, one(-1)}}};
  CHECK_THROWS_AS(gamma_functional(bad), Error);
}

TEST_CASE("functional_to_cone") {
  Gen g(87);
  ConeElement f{2, 2, 2, {{{1.0, 0.5}, g.psd(2)}, {{-0.3, 0.8}, g.psd(2, 1)}}};
  GammaResult gr = gamma_functional(f);
  try {
    functional_to_cone(gr.functional, std::nullopt);
    FAIL("missing measure accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kNoMeasureProvided);
  }

  // the same functional from a rescaled measure gives back the same F
  AtomicMeasure alt;
  for (std::size_t r = 0; r < f.terms.size(); ++r) {
    std::vector<double> eta = f.terms[r].eta;
    for (auto& x : eta) x *= -2;
    alt.atoms.push_back({"a" + std::to_string(r), 0.25 * f.terms[r].c, eta});
  }
  ConeElement back = functional_to_cone(gr.functional, alt);
  MatHomPoly a = f.polynomial(), b = back.polynomial();
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) CHECK((a.coeffs[i] - b.coeffs[i]).frobenius_norm() <= 1e-9);

  AtomicMeasure wrong;
  wrong.atoms.push_back({"w", HermMat::identity(2), {1.0, 1.0}});
  try {
    functional_to_cone(gr.functional, wrong);
    FAIL("non-representing measure accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kNotRepresenting);
  }

  PolyFunctional zero{2, 2, 2, std::vector<double>(12, 0.0)};
  ConeElement zc = functional_to_cone(zero, AtomicMeasure{});
  for (const auto& c : zc.polynomial().coeffs) CHECK(c.frobenius_norm() == 0.0);
}

TEST_CASE("norm powers and the Laplacian") {
  Gen g(88);
  for (std::size_t d : {1u, 2u, 3u})
    for (int n : {1, 2}) {
      MatHomPoly target = norm_power(d, n, one(1));
      MatHomPoly sum(d, 2 * n, 1);
      for (const auto& t : norm_power_decomposition(d, n)) {
        CHECK(t.c(0, 0).real() >= 0);
        sum += power_form(t.eta, 2 * n, t.c);
      }
      for (std::size_t i = 0; i < sum.coeffs.size(); ++i)
        CHECK(std::abs(sum.coeffs[i](0, 0).real() - target.coeffs[i](0, 0).real()) <= 1e-10);

      HermMat c = g.psd(2);
      MatHomPoly f = norm_power(d, n, c);
      MatHomPoly p = random_poly(g, d, 2 * n, 2), lp = p;
      for (int i = 0; i < n; ++i) lp = laplacian(lp);
      CHECK(trace_inner(c, lp.coeffs[0]) / factorial(2 * n) == doctest::Approx(apolar_product(p, f)));
    }
  CHECK_THROWS_AS(norm_power_decomposition(4, 3), Error);
}
