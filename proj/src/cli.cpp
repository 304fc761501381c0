#include "matmoment/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "matmoment/apolar.hpp"
#include "matmoment/commutative.hpp"
#include "matmoment/error.hpp"
#include "matmoment/fixtures.hpp"
#include "matmoment/flat_extract.hpp"
#include "matmoment/hankel.hpp"
#include "matmoment/io.hpp"
#include "matmoment/masses.hpp"
#include "matmoment/selftest.hpp"
#include "matmoment/transport.hpp"

namespace matmoment::cli {

namespace {

using io::Json;

constexpr std::uint64_t kDefaultSeed = 20240611;

int exit_code(Errc c) {
  switch (c) {
    case Errc::kNotPositive:
    case Errc::kNotFlat:
    case Errc::kNotRepresenting:
    case Errc::kNotInCoreSet:
    case Errc::kHypothesisViolated:
    case Errc::kNegativeWeight:
      return 2;
    case Errc::kNotConverged:
    case Errc::kNonCommutingShifts:
    case Errc::kDegenerateEigenvalues:
    case Errc::kResidualTooLarge:
    case Errc::kIterationBoundExceeded:
    case Errc::kCommutatorTooLarge:
      return 3;
    case Errc::kIo:
      return 4;
    default:
      return 1;
  }
}

int report_code(const FeasibilityReport& r) {
  switch (r.status) {
    case FeasibilityStatus::kFeasible:
      return 0;
    case FeasibilityStatus::kInfeasible:
      return 2;
    default:
      return 3;
  }
}

struct Globals {
  std::string input = "-";
  std::string format = "json";
  std::optional<std::uint64_t> seed;

  std::uint64_t seed_value() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("MATMOMENT_SEED")) {
      try {
        return std::stoull(env);
      } catch (const std::exception&) {
        throw Error(Errc::kInvalidInput, "MATMOMENT_SEED is not an unsigned integer");
      }
    }
    return kDefaultSeed;
  }

  Json read() const {
    if (input == "-") return io::read_stream(std::cin);
    return io::read_file(input);
  }
};

// Matrix arguments: inline JSON, "tI" shorthand, or a path to a JSON file.
HermMat parse_matrix(const std::string& s, std::size_t q) {
  static const std::regex scaled(R"(^\s*([-+]?[0-9]*\.?[0-9]*(?:[eE][-+]?[0-9]+)?)\s*\*?\s*I\s*$)");
  std::smatch m;
  if (std::regex_match(s, m, scaled)) {
    std::string t = m[1].str();
    double v = t.empty() || t == "+" ? 1.0 : t == "-" ? -1.0 : std::stod(t);
    return v * HermMat::identity(q);
  }
  if (!s.empty() && s.front() == '{') return io::herm_from_json(io::parse(s));
  return io::herm_from_json(io::read_file(s));
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw Error(Errc::kInvalidInput, "not a number: " + tok);
    }
  }
  return out;
}

std::vector<std::string> parse_list_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

void emit(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

void csv_matrix(std::ostream& out, const CMatrix& a) {
  out << "row,col,re,im\n";
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) out << i << ',' << k << ',' << a(i, k).real() << ',' << a(i, k).imag() << '\n';
}

struct Tolerances {
  double tol = 1e-9;
  double bisect_tol = 1e-10;
  double step_tol = 1e-6;
  int probes = 64;
  double residual_tol = 1e-7;
  std::string engine = "barrier";
};

Engine engine_from(const std::string& s) {
  if (s == "dykstra") return Engine::kDykstra;
  if (s == "barrier") return Engine::kBarrier;
  throw Error(Errc::kInvalidInput, "unknown engine " + s);
}

Json certificates_json(const std::vector<ProbeCertificate>& certs) {
  Json arr = Json::array();
  for (const auto& c : certs) arr.push_back({{"direction", io::to_json(c.direction)}, {"max_step", c.max_step}});
  return arr;
}

}  // namespace

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matrix moment problems on finite sets: Hankel tests, atom extraction, mass sets, transport, apolarity"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--input,-i", g.input, "input JSON file, - for stdin")->capture_default_str();
  app.add_option("--format", g.format, "output format for tabular results")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", g.seed, "random seed (falls back to MATMOMENT_SEED)");

  // hankel
  auto* hankel = app.add_subcommand("hankel", "block Hankel matrix of a moment sequence");
  int hankel_n = 1;
  std::string hankel_check;
  double rank_tol = 1e-8, psd_tol = 1e-9;
  hankel->add_option("--n", hankel_n, "Hankel level")->required();
  hankel->add_option("--check", hankel_check, "comma list of psd, flat");
  hankel->add_option("--rank-tol", rank_tol)->capture_default_str();
  hankel->add_option("--psd-tol", psd_tol)->capture_default_str();

  // extract
  auto* ext = app.add_subcommand("extract", "atoms of a flat moment sequence");
  int ext_m = 1;
  ExtractOptions eo;
  ext->add_option("--m", ext_m, "flat level")->required();
  ext->add_option("--tol,--rank-tol", eo.rank_tol)->capture_default_str();
  ext->add_option("--commute-tol", eo.commute_tol)->capture_default_str();
  ext->add_option("--residual-tol", eo.residual_tol)->capture_default_str();

  // exists
  auto* exists = app.add_subcommand("exists", "representing measure feasibility");
  FeasibilityOptions fo;
  std::string fo_engine = "dykstra";
  exists->add_option("--engine", fo_engine)->check(CLI::IsMember({"dykstra", "barrier"}))->capture_default_str();
  exists->add_option("--tol", fo.tol)->capture_default_str();
  exists->add_option("--max-iter", fo.max_iter)->capture_default_str();

  // masses
  auto* masses = app.add_subcommand("masses", "mass sets at a point");
  std::string mass_op, point, candidate;
  Tolerances mt;
  masses->add_option("op", mass_op, "member|penumbra|imax|maximal|ordered|core")
      ->required()
      ->check(CLI::IsMember({"member", "penumbra", "imax", "maximal", "ordered", "core"}));
  masses->add_option("--point", point);
  masses->add_option("--candidate", candidate, "JSON matrix, tI, or file");
  masses->add_option("--tol", mt.tol)->capture_default_str();
  masses->add_option("--bisect-tol", mt.bisect_tol)->capture_default_str();
  masses->add_option("--step-tol", mt.step_tol)->capture_default_str();
  masses->add_option("--probes", mt.probes)->capture_default_str();
  masses->add_option("--residual-tol", mt.residual_tol)->capture_default_str();
  masses->add_option("--engine", mt.engine)->check(CLI::IsMember({"dykstra", "barrier"}))->capture_default_str();

  // diagonalize
  auto* diag = app.add_subcommand("diagonalize", "simultaneous diagonalization of a commuting functional");
  double comm_tol = 1e-9;
  bool represent = false;
  diag->add_option("--tol", comm_tol)->capture_default_str();
  diag->add_flag("--represent", represent, "also build a commuting representing measure");

  // transport
  auto* transport = app.add_subcommand("transport", "push a functional (and measure) through a positive map");
  std::string map_path, measure_path;
  transport->add_option("--map", map_path, "positive map JSON file")->required();
  transport->add_option("--measure", measure_path, "measure JSON file");

  // apolar
  auto* apolar = app.add_subcommand("apolar", "apolar products and the cone functional");
  std::string apolar_op;
  apolar->add_option("op", apolar_op, "product|gamma|diff")->required()->check(CLI::IsMember({"product", "gamma", "diff"}));

  // fixtures
  auto* fix = app.add_subcommand("fixtures", "emit worked example problems");
  std::string fix_name, fix_mass = "I", fix_point = "0", fix_couplings;
  int fix_degree = 2;
  fix->add_option("name", fix_name, "e1012|e1802|nolargest|hankel-delta")
      ->required()
      ->check(CLI::IsMember({"e1012", "e1802", "nolargest", "hankel-delta"}));
  fix->add_option("--mass", fix_mass, "mass matrix (JSON, tI, or file)")->capture_default_str();
  fix->add_option("--point", fix_point, "comma separated coordinates (hankel-delta)")->capture_default_str();
  fix->add_option("--degree", fix_degree, "moment degree (hankel-delta)")->capture_default_str();
  fix->add_option("--couplings", fix_couplings, "comma separated couplings (nolargest)");
  std::size_t fix_q = 2;
  fix->add_option("--q", fix_q, "matrix size for tI masses (hankel-delta)")->capture_default_str();

  // selftest
  auto* self = app.add_subcommand("selftest", "property suites on seeded random instances");
  double fraction = 0.1;
  self->add_option("--fraction", fraction, "share of the full instance counts")->check(CLI::Range(0.0, 1.0))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*hankel) {
      MomentSequence seq = io::sequence_from_json(g.read());
      BlockHankel h = build_hankel(seq, hankel_n);
      if (g.format == "csv") {
        csv_matrix(out, h.flat.matrix());
        return 0;
      }
      Json j{{"n", hankel_n}, {"size", h.flat.dim()}, {"hankel", io::to_json(h.flat)}};
      int code = 0;
      for (const auto& c : parse_list_names(hankel_check)) {
        if (c == "psd") {
          bool psd = hankel_psd(h, psd_tol);
          j["psd"] = psd;
          j["min_eigenvalue"] = min_eigenvalue(h.flat);
          if (!psd) code = 2;
        } else if (c == "flat") {
          FlatnessReport f = is_flat(seq, hankel_n, rank_tol);
          j["flat"] = {{"flat", f.flat}, {"positive", f.positive}, {"rank_m", f.rank_m}, {"rank_m1", f.rank_m1}};
          if (!f.flat) code = 2;
        } else {
          throw Error(Errc::kInvalidInput, "unknown check " + c);
        }
      }
      j["rank"] = numeric_rank(h, rank_tol);
      emit(out, j);
      return code;
    }
    if (*ext) {
      MomentSequence seq = io::sequence_from_json(g.read());
      eo.seed = g.seed_value();
      ExtractionResult r = extract(seq, ext_m, eo);
      if (g.format == "csv") {
        out << "label,coords,trace\n";
        AtomicMeasure nu = r.measure();
        for (const auto& a : nu.atoms) {
          out << a.label << ',';
          for (std::size_t i = 0; i < a.coords.size(); ++i) out << (i ? ";" : "") << a.coords[i];
          out << ',' << a.mass.trace() << '\n';
        }
        return 0;
      }
      emit(out, io::to_json(r));
      return 0;
    }
    if (*exists) {
      io::Problem p = io::problem_from_json(g.read());
      fo.engine = engine_from(fo_engine);
      FeasibilityReport r = feasible(Spectrahedron(p.space, p.functional, p.halfspaces, p.pins), fo);
      emit(out, io::to_json(r));
      return report_code(r);
    }
    if (*masses) {
      io::Problem p = io::problem_from_json(g.read());
      MassOptions mo;
      mo.tol = mt.tol;
      mo.bisect_tol = mt.bisect_tol;
      mo.step_tol = mt.step_tol;
      mo.probes = mt.probes;
      mo.residual_tol = mt.residual_tol;
      mo.engine = engine_from(mt.engine);
      mo.seed = g.seed_value();
      const std::size_t q = p.space->q();
      auto need_point = [&] {
        if (point.empty()) throw Error(Errc::kInvalidInput, "--point is required for masses " + mass_op);
      };
      auto need_candidate = [&] {
        if (candidate.empty()) throw Error(Errc::kInvalidInput, "--candidate is required for masses " + mass_op);
        return parse_matrix(candidate, q);
      };
      if (mass_op == "member" || mass_op == "penumbra") {
        need_point();
        MassQuery mq{p.functional, point, need_candidate()};
        FeasibilityReport r = mass_op == "member" ? mass_membership(mq, mo) : penumbra_membership(mq, mo);
        Json j = io::to_json(r);
        j["member"] = r.feasible();
        emit(out, j);
        return report_code(r);
      }
      if (mass_op == "imax") {
        need_point();
        double s = scaling_I(p.functional, point, need_candidate(), mo);
        emit(out, Json{{"point", point}, {"scaling", s}, {"in_penumbra", s >= 1 - mo.tol}});
        return 0;
      }
      if (mass_op == "maximal") {
        need_point();
        std::optional<HermMat> seed;
        if (!candidate.empty()) seed = need_candidate();
        MaximalMassResult r = maximal_mass(p.functional, point, seed, mo);
        emit(out, Json{{"point", point}, {"mass", io::to_json(r.mass)}, {"rounds", r.rounds},
                       {"certificates", certificates_json(r.certificates)}});
        return 0;
      }
      if (mass_op == "ordered") {
        std::optional<std::string> first;
        if (!point.empty()) first = point;
        OrderedMaxMassResult r = ordered_maximal_measure(p.functional, first, mo);
        Json j = io::to_json(r.measure());
        j["residual_norm"] = r.residual_norm;
        Json certs = Json::array();
        for (const auto& c : r.certificates) certs.push_back(certificates_json(c));
        j["certificates"] = certs;
        emit(out, j);
        return 0;
      }
      std::vector<CoreEntry> core = core_set(p.functional, mo);
      if (g.format == "csv") {
        out << "point,sup_trace,in_core\n";
        for (const auto& c : core) out << c.point << ',' << c.sup_trace << ',' << (c.in_core ? 1 : 0) << '\n';
        return 0;
      }
      Json arr = Json::array();
      for (const auto& c : core)
        arr.push_back({{"point", c.point}, {"sup_trace", c.sup_trace}, {"in_core", c.in_core}, {"mass", io::to_json(c.mass)}});
      emit(out, Json{{"core", arr}});
      return 0;
    }
    if (*diag) {
      MatrixMomentFunctional l = io::matrix_functional_from_json(g.read());
      Diagonalization d = diagonalize(l, comm_tol);
      if (g.format == "csv") {
        out << "component";
        for (std::size_t i = 0; i < l.values.size(); ++i) out << ",g" << i;
        out << '\n';
        for (std::size_t r = 0; r < d.scalars.size(); ++r) {
          out << r;
          for (double v : d.scalars[r]) out << ',' << v;
          out << '\n';
        }
        return 0;
      }
      Json j{{"unitary", io::to_json(d.unitary)}, {"scalars", d.scalars}, {"reconstruction_error", d.reconstruction_error}};
      if (represent) {
        FeasibilityOptions ro{1e-10, 20000, Engine::kBarrier, 0};
        j["measure"] = io::to_json(represent_commutative(l, comm_tol, ro).measure);
      }
      emit(out, j);
      return 0;
    }
    if (*transport) {
      MatrixMomentFunctional l = io::matrix_functional_from_json(g.read());
      PositiveMap phi = io::map_from_json(io::read_file(map_path));
      Json j{{"functional", io::to_json(transport_functional(phi, l))}};
      if (!measure_path.empty()) j["measure"] = io::to_json(pushforward_measure(phi, io::measure_from_json(io::read_file(measure_path))));
      emit(out, j);
      return 0;
    }
    if (*apolar) {
      Json in = g.read();
      if (apolar_op == "gamma") {
        GammaResult r = gamma_functional(io::cone_from_json(in));
        emit(out, Json{{"functional", io::to_json(r.functional)}, {"max_discrepancy", r.max_discrepancy}});
        return 0;
      }
      if (!in.is_object() || !in.contains(apolar_op == "product" ? "p" : "r") || !in.contains("s"))
        throw Error(Errc::kInvalidInput, apolar_op == "product" ? "expected {\"p\", \"s\"}" : "expected {\"r\", \"s\"}");
      if (apolar_op == "product") {
        double v = apolar_product(io::poly_from_json(in["p"]), io::poly_from_json(in["s"]));
        emit(out, Json{{"product", v}});
        return 0;
      }
      emit(out, io::to_json(diff_apply(io::poly_from_json(in["r"]), io::poly_from_json(in["s"]))));
      return 0;
    }
    if (*fix) {
      if (fix_name == "e1012") {
        emit(out, io::to_json(fixtures::e1012()));
      } else if (fix_name == "e1802") {
        emit(out, io::to_json(fixtures::e1802(parse_matrix(fix_mass, 2))));
      } else if (fix_name == "nolargest") {
        fixtures::NoLargestInput in = fixtures::nolargest_default();
        if (!fix_couplings.empty()) in.couplings = parse_list(fix_couplings);
        emit(out, io::to_json(fixtures::nolargest(in)));
      } else {
        emit(out, io::to_json(fixtures::hankel_delta(parse_list(fix_point), parse_matrix(fix_mass, fix_q), fix_degree)));
      }
      return 0;
    }
    if (*self) {
      selftest::SuiteOptions so;
      so.fraction = fraction;
      so.seed = g.seed_value();
      bool all = true;
      for (const auto& r : selftest::run_suite(so)) {
        out << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail << '\n';
        all = all && r.pass;
      }
      return all ? 0 : 2;
    }
  } catch (const Error& e) {
    err << "error (" << errc_name(e.code()) << "): " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

}  // namespace matmoment::cli
