#include <cmath>

#include "doctest.h"
#include "matmoment/commutative.hpp"
#include "matmoment/error.hpp"
#include "support.hpp"

using namespace matmoment;
using mmtest::Gen;
using mmtest::herm2;

namespace {

ScalarSpaceE two_functions() {
  FiniteSpace s({{"a", {0.0}}, {"b", {1.0}}});
  return ScalarSpaceE(s, {{1.0, 1.0}, {0.0, 1.0}}, true);
}

}  // namespace

TEST_CASE("is_commutative examples") {
  ScalarSpaceE e = two_functions();
  CHECK(is_commutative({e, {HermMat::diagonal({1, 2}), HermMat::diagonal({3, -1})}}));
  CHECK_FALSE(is_commutative({e, {herm2(0, 1, 0), HermMat::diagonal({1, -1})}}));
  CHECK(is_commutative({e, {herm2(0, 1, 0), HermMat::identity(2)}}));
}

TEST_CASE("diagonalize examples") {
  ScalarSpaceE one(FiniteSpace(std::vector<Point>{{"a", {}}}), {{1.0}}, true);
  Diagonalization d = diagonalize({one, {HermMat::diagonal({2, 3})}});
  CHECK((d.unitary - CMatrix::identity(2)).frobenius_norm() <= 1e-12);
  CHECK(d.scalars[0][0] == doctest::Approx(2));
  CHECK(d.scalars[1][0] == doctest::Approx(3));

  ScalarSpaceE e = two_functions();
  d = diagonalize({e, {herm2(0, 1, 0), HermMat::identity(2)}});
  std::vector<double> first{d.scalars[0][0], d.scalars[1][0]};
  std::sort(first.begin(), first.end());
  CHECK(first[0] == doctest::Approx(-1));
  CHECK(first[1] == doctest::Approx(1));
  for (std::size_t r = 0; r < 2; ++r) CHECK(d.scalars[r][1] == doctest::Approx(1));
  CHECK(d.reconstruction_error <= 1e-12);

  try {
    diagonalize({e, {herm2(0, 1, 0), HermMat::diagonal({1, -1})}});
    FAIL("non-commuting functional diagonalized");
  } catch (const Error& ex) {
    CHECK(ex.code() == Errc::kCommutatorTooLarge);
  }
}

TEST_CASE("commuting_measure_from_diagonal examples") {
  AtomicMeasure scalar;
  scalar.atoms.push_back({"a", HermMat::diagonal({2.0}), {}});
  AtomicMeasure same = commuting_measure_from_diagonal(CMatrix::identity(1), {scalar});
  REQUIRE(same.atoms.size() == 1);
  CHECK(same.atoms[0].mass(0, 0).real() == doctest::Approx(2.0));

  AtomicMeasure va, vb;
  va.atoms.push_back({"a", HermMat::diagonal({1.0}), {}});
  vb.atoms.push_back({"b", HermMat::diagonal({1.0}), {}});
  AtomicMeasure ab = commuting_measure_from_diagonal(CMatrix::identity(2), {va, vb});
  REQUIRE(ab.atoms.size() == 2);
  for (const auto& a : ab.atoms) {
    HermMat want = a.label == "a" ? HermMat::diagonal({1, 0}) : HermMat::diagonal({0, 1});
    CHECK((a.mass - want).frobenius_norm() <= 1e-14);
  }

  Gen g(61);
  CMatrix u = g.unitary(2);
  AtomicMeasure s1, s2;
  s1.atoms.push_back({"x", HermMat::diagonal({0.7}), {}});
  s2.atoms.push_back({"x", HermMat::diagonal({1.9}), {}});
  AtomicMeasure shared = commuting_measure_from_diagonal(u, {s1, s2});
  REQUIRE(shared.atoms.size() == 1);
  CHECK(psd_check(shared.atoms[0].mass));
  CHECK(std::abs(shared.atoms[0].mass.trace() - 2.6) <= 1e-12);
  auto ev = eig_herm(shared.atoms[0].mass).values;
  CHECK(ev[0] == doctest::Approx(0.7));
  CHECK(ev[1] == doctest::Approx(1.9));

  AtomicMeasure neg;
  neg.atoms.push_back({"x", HermMat::diagonal({-1.0}), {}});
  try {
    commuting_measure_from_diagonal(CMatrix::identity(1), {neg});
    FAIL("negative weight accepted");
  } catch (const Error& ex) {
    CHECK(ex.code() == Errc::kNegativeWeight);
  }
}

TEST_CASE("commutative equivalence loop") {
  Gen g(62);
  for (int t = 0; t < 25; ++t) {
    std::size_t q = g.integer(2, 3);
    ScalarSpaceE e = mmtest::line_space({-1, -0.3, 0.4, 1}, 2);
    CMatrix u = g.unitary(q);
    std::vector<AtomicMeasure> scalars(q);
    for (auto& s : scalars)
      for (const auto& p : e.space().points())
        if (g.uniform(0, 1) < 0.6) s.atoms.push_back({p.label, HermMat::diagonal({g.uniform(0.2, 2)}), p.coords});
    AtomicMeasure nu = commuting_measure_from_diagonal(u, scalars);
    CHECK(masses_commute(nu));
    CHECK(densities_commute(nu));
    MatrixMomentFunctional l = matrix_functional_from_measure(e, nu);
    REQUIRE(is_commutative(l));
    CommutativeRepresentation rep = represent_commutative(l);
    MatrixMomentFunctional back = matrix_functional_from_measure(e, rep.measure);
    double scale = 0;
    for (const auto& v : l.values) scale = std::max(scale, v.frobenius_norm());
    for (std::size_t i = 0; i < l.values.size(); ++i) CHECK((back.values[i] - l.values[i]).frobenius_norm() <= 1e-7 * scale);
    CHECK(masses_commute(rep.measure));
  }
}

TEST_CASE("commuting masses give commutative functionals and densities") {
  Gen g(63);
  ScalarSpaceE e = mmtest::line_space({-1, 0, 1}, 2);
  CMatrix u = g.unitary(3);
  AtomicMeasure nu;
  for (const auto& p : e.space().points()) {
    CMatrix d(3, 3);
    for (std::size_t i = 0; i < 3; ++i) d(i, i) = g.uniform(0, 2);
    nu.atoms.push_back({p.label, HermMat::hermitian_part(u * d * u.adjoint()), p.coords});
  }
  CHECK(is_commutative(matrix_functional_from_measure(e, nu)));
  CHECK(masses_commute(nu));
  CHECK(densities_commute(nu));

  AtomicMeasure generic;
  for (const auto& p : e.space().points()) generic.atoms.push_back({p.label, g.psd(2), p.coords});
  CHECK_FALSE(masses_commute(generic));
  CHECK_FALSE(densities_commute(generic));
}
