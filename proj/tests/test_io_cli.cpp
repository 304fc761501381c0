#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "matmoment/cli.hpp"
#include "matmoment/error.hpp"
#include "matmoment/fixtures.hpp"
#include "matmoment/io.hpp"
#include "support.hpp"

using namespace matmoment;
using io::Json;
using mmtest::Gen;

namespace {

// Serialize, print, parse, rebuild, serialize again: both documents must be identical.
template <class T, class Back>
void round_trip(const T& value, Back back) {
  Json a = io::to_json(value);
  Json b = io::to_json(back(io::parse(a.dump())));
  CHECK(a == b);
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "matmoment");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / ("matmoment_test_" + name);
  std::ofstream(path) << content;
  return path.string();
}

Json golden(const std::string& name) { return io::read_file(std::string(MATMOMENT_FIXTURE_DIR) + "/" + name); }

}  // namespace

TEST_CASE("serialization round trips are exact") {
  Gen g(91);
  round_trip(g.herm(3), io::herm_from_json);
  round_trip(g.cmatrix(2, 3), io::cmatrix_from_json);

  io::Problem p = fixtures::e1802(g.psd(2));
  round_trip(*p.space, io::space_from_json);
  round_trip(p, io::problem_from_json);
  p.pins.push_back({"x1", g.psd(2)});
  p.halfspaces.push_back({"x2", g.herm(2), 0.25});
  round_trip(p, io::problem_from_json);
  round_trip(p.functional, [&](const Json& j) { return io::functional_from_json(j, p.space); });

  ScalarSpaceE e = mmtest::line_space({-0.3, 0.1, 0.77}, 2);
  round_trip(e, io::scalar_space_from_json);
  round_trip(e.space(), io::finite_space_from_json);

  AtomicMeasure nu;
  nu.atoms.push_back({"a", g.psd(2), {0.1 / 3, -2.0 / 7}});
  nu.atoms.push_back({"b", g.psd(2, 1), {}});
  round_trip(nu, io::measure_from_json);

  round_trip(fixtures::hankel_delta({1.0 / 3, 0.2}, g.psd(2), 4), io::sequence_from_json);

  MatrixMomentFunctional l{e, {g.herm(2), g.herm(2), g.herm(2)}};
  round_trip(l, io::matrix_functional_from_json);

  PositiveMap phi{2, 3, {g.cmatrix(2, 3), g.cmatrix(2, 3)}, true};
  round_trip(phi, io::map_from_json);

  MatHomPoly poly(2, 3, 2);
  for (auto& c : poly.coeffs) c = g.herm(2);
  round_trip(poly, io::poly_from_json);

  ConeElement cone{2, 3, 2, {{{0.1, -0.9}, g.psd(2)}}};
  round_trip(cone, io::cone_from_json);
  round_trip(gamma_functional(cone).functional, io::poly_functional_from_json);
}

TEST_CASE("parse errors") {
  try {
    io::parse("{\"a\": ");
    FAIL("malformed JSON accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kIo);
  }
  try {
    io::herm_from_json(Json{{"re", {{1, 2}}}});
    FAIL("wrong shape accepted");
  } catch (const Error& e) {
    CHECK(e.code() != Errc::kIo);
  }
  CHECK_THROWS_AS(io::read_file("/nonexistent/matmoment.json"), Error);
}

TEST_CASE("golden fixtures") {
  CHECK(io::to_json(fixtures::e1012()) == golden("e1012.json"));
  CHECK(io::to_json(fixtures::e1802()) == golden("e1802.json"));
  CHECK(io::to_json(fixtures::nolargest(fixtures::nolargest_default())) == golden("nolargest.json"));
  CHECK(io::to_json(fixtures::hankel_delta({0.0}, HermMat::identity(2), 2)) == golden("hankel-delta-origin.json"));
  CHECK(io::to_json(fixtures::hankel_delta({1.0}, HermMat::identity(1), 4)) == golden("hankel-delta-one.json"));
  CHECK(io::to_json(fixtures::hankel_delta({0.5, -1.0}, 2.0 * HermMat::identity(2), 4)) ==
        golden("hankel-delta-2d.json"));

  Run r = run_cli({"fixtures", "e1012"});
  CHECK(r.code == 0);
  CHECK(io::parse(r.out) == golden("e1012.json"));
  r = run_cli({"fixtures", "hankel-delta", "--point", "0.5,-1", "--mass", "2I", "--q", "2", "--degree", "4"});
  CHECK(r.code == 0);
  CHECK(io::parse(r.out) == golden("hankel-delta-2d.json"));
}

TEST_CASE("cli exit codes") {
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"no-such-command"}).code == 1);

  std::string e1802 = temp_file("e1802.json", golden("e1802.json").dump());
  CHECK(run_cli({"--input", e1802, "exists"}).code == 0);
  CHECK(run_cli({"--input", e1802, "masses", "member", "--point", "x0", "--candidate", "2I"}).code == 0);
  CHECK(run_cli({"--input", e1802, "masses", "penumbra", "--point", "x0", "--candidate", "2.05I"}).code == 2);
  CHECK(run_cli({"--input", e1802, "masses", "member", "--point", "nowhere", "--candidate", "I"}).code == 1);

  Run core = run_cli({"--input", e1802, "--format", "csv", "masses", "core"});
  CHECK(core.code == 0);
  CHECK(core.out.find("x0") != std::string::npos);

  std::string broken = temp_file("broken.json", "{\"space\": ");
  CHECK(run_cli({"--input", broken, "exists"}).code == 4);
  CHECK(run_cli({"--input", "/nonexistent/in.json", "exists"}).code == 4);

  std::string seq = temp_file("delta.json", golden("hankel-delta-one.json").dump());
  Run h = run_cli({"--input", seq, "hankel", "--n", "1", "--check", "psd,flat"});
  CHECK(h.code == 0);
  CHECK(run_cli({"--input", seq, "extract", "--m", "1"}).code == 0);

  MomentSequence bad(1, 1, 4);
  bad.set({0}, HermMat::diagonal({1.0}));
  bad.set({2}, HermMat::diagonal({-1.0}));
  std::string neg = temp_file("neg.json", io::to_json(bad).dump());
  CHECK(run_cli({"--input", neg, "extract", "--m", "1"}).code == 2);
}

TEST_CASE("seed falls back to the environment") {
  std::string seq = temp_file("seed.json", golden("hankel-delta-2d.json").dump());
  setenv("MATMOMENT_SEED", "5", 1);
  Run a = run_cli({"--input", seq, "extract", "--m", "1"});
  Run b = run_cli({"--input", seq, "--seed", "5", "extract", "--m", "1"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  setenv("MATMOMENT_SEED", "not-a-number", 1);
  CHECK(run_cli({"--input", seq, "extract", "--m", "1"}).code == 1);
  unsetenv("MATMOMENT_SEED");
}
