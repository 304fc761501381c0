#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "matmoment/error.hpp"
#include "matmoment/fixtures.hpp"
#include "matmoment/flat_extract.hpp"
#include "support.hpp"

using namespace matmoment;
using mmtest::Gen;

namespace {

double max_moment_error(const MomentSequence& a, const MomentSequence& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.moments().size(); ++i) {
    num = std::max(num, (a.moments()[i] - b.moments()[i]).frobenius_norm());
    den = std::max(den, a.moments()[i].frobenius_norm());
  }
  return num / den;
}

}  // namespace

TEST_CASE("moments_from_measure examples") {
  MomentSequence empty = moments_from_measure(AtomicMeasure{}, 3, 2, 2);
  for (const auto& s : empty.moments()) CHECK(s.frobenius_norm() == 0.0);

  AtomicMeasure origin;
  origin.atoms.push_back({"o", HermMat::identity(2), {0.0, 0.0}});
  MomentSequence s = moments_from_measure(origin, 3);
  CHECK((s.at({0, 0}) - HermMat::identity(2)).frobenius_norm() == 0.0);
  for (std::size_t i = 1; i < s.moments().size(); ++i) CHECK(s.moments()[i].frobenius_norm() == 0.0);

  AtomicMeasure one;
  one.atoms.push_back({"p", HermMat::identity(1), {1.0}});
  MomentSequence ones = moments_from_measure(one, 5);
  for (const auto& m : ones.moments()) CHECK(m(0, 0).real() == 1.0);

  AtomicMeasure missing = one;
  missing.atoms.push_back({"q", HermMat::identity(1), {}});
  CHECK_THROWS_AS(moments_from_measure(missing, 2), Error);
}

TEST_CASE("extract examples") {
  ExtractionResult r = extract(fixtures::hankel_delta({0.0}, HermMat::identity(2), 4), 1);
  REQUIRE(r.points.size() == 1);
  CHECK(std::abs(r.points[0][0]) <= 1e-10);
  CHECK((r.masses[0] - HermMat::identity(2)).frobenius_norm() <= 1e-10);
  CHECK(r.residual <= 1e-10);

  r = extract(fixtures::hankel_delta({1.0}, HermMat::identity(1), 4), 1);
  REQUIRE(r.points.size() == 1);
  CHECK(r.points[0][0] == doctest::Approx(1.0));
  CHECK(r.masses[0](0, 0).real() == doctest::Approx(1.0));

  Gen g(31);
  HermMat m1 = g.psd(2), m2 = g.psd(2);
  AtomicMeasure nu;
  nu.atoms.push_back({"a", m1, {0.0, 0.0}});
  nu.atoms.push_back({"b", m2, {1.0, 2.0}});
  r = extract(moments_from_measure(nu, 6), 2);
  REQUIRE(r.points.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    bool first = std::abs(r.points[i][0]) < 0.5;
    const auto& want = first ? nu.atoms[0] : nu.atoms[1];
    CHECK(std::abs(r.points[i][0] - want.coords[0]) <= 1e-6);
    CHECK(std::abs(r.points[i][1] - want.coords[1]) <= 1e-6);
    CHECK((r.masses[i] - want.mass).frobenius_norm() <= 1e-6 * want.mass.frobenius_norm());
  }
}

TEST_CASE("extract rejects non-positive and non-flat input") {
  MomentSequence bad(1, 1, 4);
  bad.set({0}, HermMat::diagonal({1.0}));
  bad.set({2}, HermMat::diagonal({-1.0}));
  try {
    extract(bad, 1);
    FAIL("indefinite sequence accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kNotPositive);
  }
  MomentSequence lebesgue(1, 1, 4);
  for (int k = 0; k <= 4; ++k) lebesgue.set({k}, HermMat::diagonal({1.0 / (k + 1)}));
  try {
    extract(lebesgue, 1);
    FAIL("non-flat sequence accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kNotFlat);
  }
}

TEST_CASE("extraction round trip on random measures") {
  Gen g(32);
  for (int t = 0; t < 30; ++t) {
    std::size_t d = g.integer(1, 2), q = g.integer(1, 2);
    int k = g.integer(1, 4);
    int m = 0;
    while (MultiIndexSet(d, m).size() < static_cast<std::size_t>(k + 1)) ++m;
    AtomicMeasure nu;
    while (static_cast<int>(nu.atoms.size()) < k) {
      std::vector<double> x(d);
      for (auto& c : x) c = g.uniform(-1.5, 1.5);
      bool far = true;
      for (const auto& a : nu.atoms) {
        double s = 0;
        for (std::size_t i = 0; i < d; ++i) s += std::pow(a.coords[i] - x[i], 2);
        far = far && std::sqrt(s) > 0.4;
      }
      if (far) nu.atoms.push_back({"a" + std::to_string(nu.atoms.size()), g.psd(q, g.integer(1, q)), x});
    }
    MomentSequence seq = moments_from_measure(nu, 2 * m + 2);
    ExtractionResult r = extract(seq, m);
    CHECK(max_moment_error(seq, moments_from_measure(r.measure(), 2 * m + 2, d, q)) <= 1e-6);
    CHECK(r.points.size() <= numeric_rank(build_hankel(seq, m)));
    for (const auto& mass : r.masses) CHECK(psd_check(mass, 1e-10));
  }
}

TEST_CASE("rank-one regrouping agrees with the least-squares masses") {
  Gen g(33);
  AtomicMeasure nu;
  nu.atoms.push_back({"a", g.psd(2), {-0.5}});
  nu.atoms.push_back({"b", g.psd(2, 1), {0.7}});
  ExtractionResult r = extract(moments_from_measure(nu, 6), 2);
  REQUIRE(r.points.size() == 2);
  REQUIRE(r.diagnostics.rank_one_masses.size() == r.masses.size());
  for (std::size_t i = 0; i < r.masses.size(); ++i)
    CHECK((r.diagnostics.rank_one_masses[i] - r.masses[i]).frobenius_norm() <= 1e-6 * r.masses[i].frobenius_norm());
}

TEST_CASE("extraction is deterministic given the seed") {
  Gen g(34);
  AtomicMeasure nu;
  nu.atoms.push_back({"a", g.psd(2), {0.1, 0.2}});
  nu.atoms.push_back({"b", g.psd(2), {-0.6, 0.4}});
  nu.atoms.push_back({"c", g.psd(2), {0.5, -0.7}});
  MomentSequence seq = moments_from_measure(nu, 6);
  ExtractOptions o;
  o.seed = 99;
  ExtractionResult a = extract(seq, 2, o), b = extract(seq, 2, o);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i] == b.points[i]);
    CHECK(a.masses[i] == b.masses[i]);
  }
}
