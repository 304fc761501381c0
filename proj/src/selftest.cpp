#include "matmoment/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "matmoment/apolar.hpp"
#include "matmoment/commutative.hpp"
#include "matmoment/error.hpp"
#include "matmoment/fixtures.hpp"
#include "matmoment/flat_extract.hpp"
#include "matmoment/hankel.hpp"
#include "matmoment/masses.hpp"
#include "matmoment/transport.hpp"

namespace matmoment::selftest {

namespace {

using Rng = std::mt19937_64;
using Clock = std::chrono::steady_clock;

double gauss(Rng& rng) { return std::normal_distribution<double>()(rng); }
double unif(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

CMatrix rand_cmatrix(std::size_t r, std::size_t c, Rng& rng) {
  CMatrix a(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
  return a;
}

HermMat rand_herm(std::size_t q, Rng& rng) { return HermMat::hermitian_part(rand_cmatrix(q, q, rng)); }

HermMat rand_psd(std::size_t q, std::size_t rank, Rng& rng) {
  CMatrix g = rand_cmatrix(q, rank, rng);
  return HermMat::hermitian_part(g * g.adjoint());
}

CMatrix rand_unitary(std::size_t q, Rng& rng) { return eig_herm(rand_herm(q, rng)).vectors; }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double vec_norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<Point> random_points(std::size_t n, std::size_t d, double spread, double min_sep, Rng& rng) {
  std::vector<Point> pts;
  while (pts.size() < n) {
    std::vector<double> c(d);
    for (double& x : c) x = unif(rng, -spread, spread);
    bool ok = true;
    for (const auto& p : pts) {
      double s = 0;
      for (std::size_t i = 0; i < d; ++i) s += (p.coords[i] - c[i]) * (p.coords[i] - c[i]);
      if (std::sqrt(s) < min_sep) ok = false;
    }
    if (ok) pts.push_back({"x" + std::to_string(pts.size()), c});
  }
  return pts;
}

// Monomials of degree <= deg evaluated on the points, pruned to an independent set; 1 comes first.
ScalarSpaceE polynomial_space(const std::vector<Point>& pts, int deg, std::size_t max_dim) {
  std::size_t d = pts.front().coords.size();
  MultiIndexSet idx(d, deg);
  std::vector<std::vector<double>> tables;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    std::vector<double> t;
    for (const auto& p : pts) t.push_back(monomial(p.coords, idx[a]));
    tables.push_back(t);
  }
  std::vector<std::vector<double>> basis;
  for (std::size_t i : independent_subset(tables))
    if (basis.size() < max_dim) basis.push_back(tables[i]);
  return ScalarSpaceE(FiniteSpace(pts), basis, true);
}

CheckResult finish(CheckResult r, Clock::time_point t0) {
  r.seconds = seconds_since(t0);
  return r;
}

}  // namespace

CheckResult hankel_identity(int cases, std::uint64_t seed) {
  auto t0 = Clock::now();
  CheckResult r{1, "hankel identity", true, "", 0};
  Rng rng(seed);
  double worst = 0;
  for (int c = 0; c < cases; ++c) {
    std::size_t d = pick(rng, 1, 2), q = pick(rng, 1, 2);
    int n = pick(rng, 0, 2);
    MomentSequence seq(d, q, 2 * n);
    for (const auto& a : seq.index().indices()) seq.set(a, rand_herm(q, rng));
    BlockHankel h = build_hankel(seq, n);
    MultiIndexSet idx(d, n);
    BlockVector a, b;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      a.push_back(rand_cmatrix(q, q, rng));
      b.push_back(rand_cmatrix(q, q, rng));
    }
    Complex via_hankel = quad_form(h, a, b);
    // Expand the product A B* coefficient by coefficient, then pair with the moments.
    std::map<MultiIndex, CMatrix> prod;
    for (std::size_t l = 0; l < idx.size(); ++l)
      for (std::size_t k = 0; k < idx.size(); ++k) {
        MultiIndex al = add(idx[l], idx[k]);
        auto it = prod.find(al);
        if (it == prod.end()) it = prod.emplace(al, CMatrix(q, q)).first;
        it->second += a[l] * b[k].adjoint();
      }
    Complex direct = 0;
    double scale = 0;
    for (const auto& [al, cm] : prod) {
      CMatrix t = cm * seq.at(al).matrix();
      for (std::size_t i = 0; i < q; ++i) direct += t(i, i);
      scale += cm.frobenius_norm() * seq.at(al).frobenius_norm();
    }
    double err = std::abs(via_hankel - direct) / std::max({std::abs(direct), scale, 1e-300});
    worst = std::max(worst, err);
  }
  double secs = seconds_since(t0);
  r.pass = worst <= 1e-10 && secs < 5.0;
  r.detail = std::to_string(cases) + " cases, max rel err " + fmt(worst) + ", " + fmt(secs) + " s";
  return finish(r, t0);
}

CheckResult positivity_equivalence(int sequences, int probes, std::uint64_t seed) {
  auto t0 = Clock::now();
  CheckResult r{2, "positivity equivalence", true, "", 0};
  Rng rng(seed);
  int agree = 0, psd_count = 0;
  for (int s = 0; s < sequences; ++s) {
    std::size_t d = pick(rng, 1, 2), q = pick(rng, 1, 2);
    int n = pick(rng, 1, 2);
    int k = pick(rng, 1, 4);
    AtomicMeasure nu;
    for (const auto& p : random_points(k, d, 1.0, 0.1, rng))
      nu.atoms.push_back({p.label, rand_psd(q, pick(rng, 1, static_cast<int>(q)), rng), p.coords});
    MomentSequence seq = moments_from_measure(nu, 2 * n);
    if (s % 2 == 1) {
      MultiIndex zero(d, 0);
      double top = eig_herm(seq.at(zero)).values.back();
      seq.set(zero, seq.at(zero) - (top * unif(rng, 1.01, 2.0)) * HermMat::identity(q));
    }
    BlockHankel h = build_hankel(seq, n);
    bool psd = hankel_psd(h, 1e-9);
    psd_count += psd;
    double lmax = std::max(spectral_radius(h.flat), 1e-300);
    double min_probe = std::numeric_limits<double>::infinity();
    for (int p = 0; p < probes; ++p) {
      BlockVector a;
      double norm2 = 0;
      for (std::size_t i = 0; i < h.index.size(); ++i) {
        bool on = i == 0 || unif(rng, 0, 1) < 0.5;
        CMatrix blk = on ? rand_cmatrix(q, q, rng) : CMatrix(q, q);
        norm2 += std::pow(blk.frobenius_norm(), 2);
        a.push_back(blk);
      }
      min_probe = std::min(min_probe, quad_form(h, a, a).real() / (norm2 * lmax));
    }
    bool probes_nonneg = min_probe >= -1e-9;
    if (psd == probes_nonneg) ++agree;
  }
  r.pass = agree == sequences;
  r.detail = std::to_string(agree) + "/" + std::to_string(sequences) + " agree (" + std::to_string(psd_count) +
             " PSD), " + std::to_string(probes) + " probes each";
  return finish(r, t0);
}

CheckResult flat_round_trip(int cases, std::uint64_t seed) {
  auto t0 = Clock::now();
  CheckResult r{3, "flat extraction round trip", true, "", 0};
  Rng rng(seed);
  double worst = 0;
  int ok = 0;
  std::string first_failure;
  for (int c = 0; c < cases; ++c) {
    std::size_t d = pick(rng, 1, 2), q = pick(rng, 1, 2);
    int k = pick(rng, 1, 4);
    int m = 0;
    while (MultiIndexSet(d, m).size() < static_cast<std::size_t>(k + 1)) ++m;
    AtomicMeasure nu;
    for (const auto& p : random_points(k, d, 1.5, 0.4, rng))
      nu.atoms.push_back({p.label, rand_psd(q, pick(rng, 1, static_cast<int>(q)), rng), p.coords});
    MomentSequence seq = moments_from_measure(nu, 2 * m + 2);
    try {
      ExtractOptions eo;
      eo.seed = seed + c;
      ExtractionResult ex = extract(seq, m, eo);
      MomentSequence back = moments_from_measure(ex.measure(), 2 * m + 2, d, q);
      double num = 0, den = 0;
      for (std::size_t i = 0; i < seq.moments().size(); ++i) {
        num = std::max(num, (back.moments()[i] - seq.moments()[i]).frobenius_norm());
        den = std::max(den, seq.moments()[i].frobenius_norm());
      }
      double err = num / den;
      worst = std::max(worst, err);
      std::size_t rank = numeric_rank(build_hankel(seq, m));
      if (err <= 1e-6 && ex.points.size() <= rank) {
        ++ok;
      } else if (first_failure.empty()) {
        first_failure = "case " + std::to_string(c) + " err " + fmt(err);
      }
    } catch (const Error& e) {
      if (first_failure.empty()) first_failure = "case " + std::to_string(c) + ": " + e.what();
    }
  }
  double secs = seconds_since(t0);
  r.pass = ok == cases && secs < 30.0;
  r.detail = std::to_string(ok) + "/" + std::to_string(cases) + " reproduced, max rel err " + fmt(worst) + ", " +
             fmt(secs) + " s";
  if (!first_failure.empty()) r.detail += "; " + first_failure;
  return finish(r, t0);
}

CheckResult richter_reduction(int cases, std::uint64_t seed) {
  auto t0 = Clock::now();
  CheckResult r{4, "Richter-Tchakaloff reduction", true, "", 0};
  Rng rng(seed);
  int ok = 0;
  double worst = 0;
  std::string first_failure;
  for (int c = 0; c < cases; ++c) {
    std::size_t q = pick(rng, 1, 2), d = pick(rng, 1, 2);
    std::size_t n = pick(rng, 6, 10);
    std::size_t max_dim = std::max<std::size_t>(1, std::min<std::size_t>(3, (n - 1) / (q * q)));
    auto pts = random_points(n, d, 1.0, 0.05, rng);
    ScalarSpaceE e = polynomial_space(pts, 2, max_dim);
    auto space = std::make_shared<const MatrixFunctionSpace>(lift_scalar_space(e, q));
    AtomicMeasure nu;
    for (const auto& p : pts) nu.atoms.push_back({p.label, rand_psd(q, q, rng), p.coords});
    MomentFunctional lambda = functional_from_measure(space, nu);
    try {
      AtomicMeasure red = richter_reduce(*space, lambda, nu);
      std::size_t atoms = 0;
      bool psd = true;
      for (const auto& a : red.atoms) {
        if (a.mass.frobenius_norm() > 0) ++atoms;
        psd = psd && psd_check(a.mass, 1e-12);
      }
      double err = relative_error(functional_from_measure(*space, red).values, lambda.values);
      worst = std::max(worst, err);
      if (atoms <= space->dim() && psd && err <= 1e-8) {
        ++ok;
      } else if (first_failure.empty()) {
        first_failure = "case " + std::to_string(c) + ": " + std::to_string(atoms) + " atoms, err " + fmt(err);
      }
    } catch (const Error& e) {
      if (first_failure.empty()) first_failure = "case " + std::to_string(c) + ": " + e.what();
    }
  }
  r.pass = ok == cases;
  r.detail = std::to_string(ok) + "/" + std::to_string(cases) + " reduced, max rel err " + fmt(worst);
  if (!first_failure.empty()) r.detail += "; " + first_failure;
  return finish(r, t0);
}

namespace {

HermMat a_eta(double eta) {
  CMatrix m(2, 2);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(0, 1) = eta;
  m(1, 0) = eta;
  return HermMat::from_matrix(m);
}

bool feasible_status(const FeasibilityReport& r) { return r.status == FeasibilityStatus::kFeasible; }

}  // namespace

CheckResult example_e1012() {
  auto t0 = Clock::now();
  CheckResult r{5, "E1012 antichain", true, "", 0};
  io::Problem p = fixtures::e1012();
  std::ostringstream os;
  bool accept_all = true;
  for (double eta : {-1.0, -0.5, 0.0, 0.5, 1.0})
    accept_all = accept_all && feasible_status(mass_membership({p.functional, "x0", a_eta(eta)}));
  bool reject = !feasible_status(mass_membership({p.functional, "x0", HermMat::diagonal({1.1, 1.0})})) &&
                !feasible_status(mass_membership({p.functional, "x0", HermMat::diagonal({1.0, 0.9})}));
  HermMat m1 = maximal_mass(p.functional, "x0", a_eta(0.9)).mass;
  HermMat m2 = maximal_mass(p.functional, "x0", a_eta(-0.9)).mass;
  bool incomparable = !loewner_geq(m1, m2, 1e-4) && !loewner_geq(m2, m1, 1e-4);
  bool in_set = feasible_status(mass_membership({p.functional, "x0", psd_project(m1)})) &&
                feasible_status(mass_membership({p.functional, "x0", psd_project(m2)}));
  r.pass = accept_all && reject && incomparable && in_set;
  os << "A_eta accepted: " << accept_all << ", rejections: " << reject << ", maxima incomparable: " << incomparable
     << " (off-diagonals " << fmt(m1(0, 1).real()) << ", " << fmt(m2(0, 1).real()) << ")";
  r.detail = os.str();
  return finish(r, t0);
}

CheckResult example_e1802(int grid) {
  auto t0 = Clock::now();
  CheckResult r{6, "E1802 penumbra and grid oracle", true, "", 0};
  io::Problem p = fixtures::e1802();
  const HermMat id = HermMat::identity(2);
  bool accept = true;
  for (double t : {0.0, 0.5, 1.0, 1.5, 2.0}) accept = accept && feasible_status(penumbra_membership({p.functional, "x0", t * id}));
  bool reject = !feasible_status(penumbra_membership({p.functional, "x0", 2.05 * id}));
  HermMat mx = maximal_mass(p.functional, "x0", id).mass;
  double max_err = (mx - 2.0 * id).frobenius_norm();

  MassOptions mo;
  int interior = 0, agree = 0;
  for (int ia = 0; ia < grid; ++ia)
    for (int ib = 0; ib < grid; ++ib)
      for (int ic = 0; ic < grid; ++ic)
        for (int id4 = 0; id4 < grid; ++id4) {
          auto lin = [&](int i, double lo, double hi) { return lo + (hi - lo) * i / std::max(1, grid - 1); };
          double a = lin(ia, -1.4, 1.4), b = lin(ib, -1.1, 1.1), c = lin(ic, -1.1, 1.1), dd = lin(id4, -1.4, 1.4);
          CMatrix am(2, 2);
          am(0, 0) = a;
          am(1, 1) = dd;
          am(0, 1) = Complex(b, c);
          am(1, 0) = Complex(b, -c);
          HermMat A = HermMat::from_matrix(am);
          double margin = std::min({min_eigenvalue(id - A), min_eigenvalue(A + id)});
          if (std::abs(margin) <= 10 * mo.tol) continue;
          ++interior;
          HermMat y = id + A;
          bool oracle = margin > 0;
          bool got = psd_check(y, 1e-12) && feasible_status(mass_membership({p.functional, "x0", y}, mo));
          if (got == oracle) ++agree;
        }
  double rate = interior ? static_cast<double>(agree) / interior : 0.0;
  r.pass = accept && reject && max_err <= 1e-4 && rate >= 0.99;
  std::ostringstream os;
  os << "tI accepted: " << accept << ", 2.05I rejected: " << reject << ", |maximal - 2I| = " << fmt(max_err)
     << ", grid agreement " << agree << "/" << interior;
  r.detail = os.str();
  return finish(r, t0);
}

namespace {

struct OrderedCheck {
  bool ok = true;
  std::string why;
};

OrderedCheck check_ordered(const MomentFunctional& lambda, int probes, std::uint64_t seed, const MassOptions& mo) {
  OrderedCheck out;
  OrderedMaxMassResult res;
  try {
    res = ordered_maximal_measure(lambda, std::nullopt, mo);
  } catch (const Error& e) {
    return {false, e.what()};
  }
  const MatrixFunctionSpace& sp = *lambda.domain;
  if (res.atoms.size() > sp.dim()) return {false, "too many atoms"};
  double err = relative_error(functional_from_measure(sp, res.measure()).values, lambda.values);
  if (err > 1e-6) return {false, "reproduction error " + fmt(err)};
  double scale = mass_scale(lambda);
  double step = 10 * mo.step_tol * scale;
  MassOptions probe = mo;
  probe.scale = scale;
  Rng rng(seed);
  MomentFunctional rk = lambda;
  for (const auto& atom : res.atoms) {
    for (int t = 0; t < probes; ++t) {
      CVector v(sp.q());
      double nv = 0;
      for (auto& z : v) {
        z = Complex(gauss(rng), gauss(rng));
        nv += std::norm(z);
      }
      for (auto& z : v) z /= std::sqrt(nv);
      HermMat y = atom.mass + step * HermMat::outer(v);
      MomentFunctional shifted = subtract_mass(rk, atom.label, y);
      if (feasible_status(feasible(Spectrahedron(lambda.domain, shifted), feasibility_options(probe))))
        return {false, "atom " + atom.label + " extends along a probe"};
    }
    rk = subtract_mass(rk, atom.label, atom.mass);
  }
  return out;
}

}  // namespace

CheckResult ordered_maximal(int random_problems, int probes, std::uint64_t seed) {
  auto t0 = Clock::now();
  CheckResult r{7, "ordered maximal mass construction", true, "", 0};
  MassOptions mo;
  int ok = 0, total = 0;
  std::string first_failure;
  auto record = [&](const OrderedCheck& c, const std::string& name) {
    ++total;
    if (c.ok) {
      ++ok;
    } else if (first_failure.empty()) {
      first_failure = name + ": " + c.why;
    }
  };
  record(check_ordered(fixtures::e1802().functional, probes, seed, mo), "E1802");
  Rng rng(seed);
  for (int c = 0; c < random_problems; ++c) {
    std::size_t q = pick(rng, 1, 2), d = pick(rng, 1, 2), n = pick(rng, 3, 5);
    auto pts = random_points(n, d, 1.0, 0.2, rng);
    ScalarSpaceE e = polynomial_space(pts, 1, 3);
    auto space = std::make_shared<const MatrixFunctionSpace>(lift_scalar_space(e, q));
    AtomicMeasure nu;
    for (const auto& p : pts)
      if (unif(rng, 0, 1) < 0.7 || nu.atoms.empty()) nu.atoms.push_back({p.label, rand_psd(q, pick(rng, 1, q), rng), p.coords});
    record(check_ordered(functional_from_measure(space, nu), probes, seed + c + 1, mo), "random " + std::to_string(c));
  }
  r.pass = ok == total;
  r.detail = std::to_string(ok) + "/" + std::to_string(total) + " problems certified";
  if (!first_failure.empty()) r.detail += "; " + first_failure;
  return finish(r, t0);
}

CheckResult commutative_loop(int cases, std::uint64_t seed) {
  auto t0 = Clock::now();
  CheckResult r{8, "commutative equivalences", true, "", 0};
  Rng rng(seed);
  int ok = 0;
  double worst = 0;
  std::string first_failure;
  for (int c = 0; c < cases; ++c) {
    std::size_t q = pick(rng, 2, 3), n = pick(rng, 3, 5);
    auto pts = random_points(n, 1, 1.0, 0.1, rng);
    ScalarSpaceE e = polynomial_space(pts, 2, 3);
    CMatrix u = rand_unitary(q, rng);
    std::vector<AtomicMeasure> scalars(q);
    for (std::size_t rr = 0; rr < q; ++rr)
      for (const auto& p : pts)
        if (unif(rng, 0, 1) < 0.6) scalars[rr].atoms.push_back({p.label, HermMat::diagonal({unif(rng, 0.2, 2.0)}), p.coords});
    AtomicMeasure nu = commuting_measure_from_diagonal(u, scalars);
    MatrixMomentFunctional l = matrix_functional_from_measure(e, nu);
    try {
      if (!is_commutative(l)) throw Error(Errc::kCommutatorTooLarge, "commuting input rejected");
      CommutativeRepresentation rep = represent_commutative(l);
      MatrixMomentFunctional back = matrix_functional_from_measure(e, rep.measure);
      double num = 0, den = 0;
      for (std::size_t i = 0; i < l.values.size(); ++i) {
        num = std::max(num, (back.values[i] - l.values[i]).frobenius_norm());
        den = std::max(den, l.values[i].frobenius_norm());
      }
      double err = num / std::max(den, 1e-300);
      worst = std::max(worst, err);
      if (err <= 1e-7 && masses_commute(rep.measure) && densities_commute(rep.measure)) {
        ++ok;
      } else if (first_failure.empty()) {
        first_failure = "case " + std::to_string(c) + " err " + fmt(err);
      }
    } catch (const Error& ex) {
      if (first_failure.empty()) first_failure = "case " + std::to_string(c) + ": " + ex.what();
    }
  }
  // Non-commuting control.
  auto pts = random_points(3, 1, 1.0, 0.1, rng);
  ScalarSpaceE e = polynomial_space(pts, 2, 3);
  AtomicMeasure nu;
  for (const auto& p : pts) nu.atoms.push_back({p.label, rand_psd(2, 2, rng), p.coords});
  MatrixMomentFunctional ctrl = matrix_functional_from_measure(e, nu);
  bool rejected = !is_commutative(ctrl);
  try {
    diagonalize(ctrl);
    rejected = false;
  } catch (const Error& ex) {
    rejected = rejected && ex.code() == Errc::kCommutatorTooLarge;
  }
  r.pass = ok == cases && rejected;
  r.detail = std::to_string(ok) + "/" + std::to_string(cases) + " loops closed, max rel err " + fmt(worst) +
             ", control rejected: " + (rejected ? "yes" : "no");
  if (!first_failure.empty()) r.detail += "; " + first_failure;
  return finish(r, t0);
}

CheckResult transport_identities(int cases, std::uint64_t seed) {
  auto t0 = Clock::now();
  CheckResult r{9, "transport identities", true, "", 0};
  Rng rng(seed);
  double worst_fun = 0, worst_meas = 0, worst_tensor = 0;
  for (int c = 0; c < cases; ++c) {
    std::size_t q = pick(rng, 1, 3), p = (c % 3 == 0) ? q : pick(rng, 1, 3);
    PositiveMap phi{q, p, {}, unif(rng, 0, 1) < 0.3};
    int nk = pick(rng, 1, 3);
    for (int k = 0; k < nk; ++k) phi.kraus.push_back(rand_cmatrix(q, p, rng));
    auto pts = random_points(pick(rng, 2, 4), 1, 1.0, 0.1, rng);
    ScalarSpaceE e = polynomial_space(pts, 2, 3);
    AtomicMeasure mu;
    for (const auto& pt : pts) mu.atoms.push_back({pt.label, rand_psd(q, pick(rng, 1, q), rng), pt.coords});
    MatrixMomentFunctional l = matrix_functional_from_measure(e, mu);
    MatrixMomentFunctional lp = transport_functional(phi, l);

    MomentFunctional big_p = functional_from_L(lp);
    MomentFunctional big_q = functional_from_L(l);
    std::vector<double> f(big_p.values.size());
    for (double& x : f) x = gauss(rng);
    double lhs = eval_functional(big_p, f);
    double rhs = eval_functional(big_q, pullback_coefficients(phi, f));
    worst_fun = std::max(worst_fun, std::abs(lhs - rhs) / std::max({std::abs(lhs), big_p.norm() * vec_norm(f), 1e-300}));

    MatrixMomentFunctional pushed = matrix_functional_from_measure(e, pushforward_measure(phi, mu));
    double num = 0, den = 0;
    for (std::size_t i = 0; i < lp.values.size(); ++i) {
      num = std::max(num, (pushed.values[i] - lp.values[i]).frobenius_norm());
      den = std::max(den, lp.values[i].frobenius_norm());
    }
    worst_meas = std::max(worst_meas, num / std::max(den, 1e-300));

    if (p == q) {
      std::vector<double> g(big_q.values.size());
      for (double& x : g) x = gauss(rng);
      CMatrix left = l_otimes(lp, q, g);
      CMatrix right = id_tensor_apply(phi, q, l_otimes(l, q, g));
      worst_tensor = std::max(worst_tensor, (left - right).frobenius_norm() / std::max(right.frobenius_norm(), 1e-300));
    }
  }
  r.pass = worst_fun <= 1e-9 && worst_meas <= 1e-9 && worst_tensor <= 1e-10;
  r.detail = std::to_string(cases) + " triples; functional " + fmt(worst_fun) + ", measure " + fmt(worst_meas) +
             ", tensor " + fmt(worst_tensor);
  return finish(r, t0);
}

namespace {

MatHomPoly rand_poly(std::size_t d, int m, std::size_t q, Rng& rng) {
  MatHomPoly p(d, m, q);
  for (auto& c : p.coeffs) c = rand_herm(q, rng);
  return p;
}

ConeElement rand_cone(Rng& rng) {
  std::size_t d = pick(rng, 1, 3), q = pick(rng, 1, 2);
  int m = pick(rng, 0, 4);
  ConeElement f{d, m, q, {}};
  int terms = pick(rng, 1, 4);
  for (int t = 0; t < terms; ++t) {
    std::vector<double> eta(d);
    for (double& x : eta) x = gauss(rng);
    f.terms.push_back({eta, rand_psd(q, pick(rng, 1, q), rng)});
  }
  return f;
}

// A different measure with the same power sums: scaled directions, sign flips for even m, split weights.
AtomicMeasure rerepresent(const ConeElement& f, Rng& rng) {
  AtomicMeasure nu;
  int idx = 0;
  for (const auto& t : f.terms) {
    for (int half = 0; half < 2; ++half) {
      double s = unif(rng, 0.5, 2.0);
      if (f.m % 2 == 0 && half == 1) s = -s;
      std::vector<double> eta = t.eta;
      for (double& x : eta) x *= s;
      double w = 0.5 / std::pow(std::abs(s), f.m);
      nu.atoms.push_back({"r" + std::to_string(idx++), w * t.c, eta});
    }
  }
  return nu;
}

}  // namespace

CheckResult apolar_duality(int pairs, int cones, std::uint64_t seed) {
  auto t0 = Clock::now();
  CheckResult r{10, "apolar duality", true, "", 0};
  Rng rng(seed);
  double worst_pair = 0, worst_gamma = 0, worst_cone = 0;
  for (int c = 0; c < pairs; ++c) {
    std::size_t d = pick(rng, 1, 3), q = pick(rng, 1, 2);
    int m = pick(rng, 0, 4);
    MatHomPoly p = rand_poly(d, m, q, rng), s = rand_poly(d, m, q, rng);
    double ap = apolar_product(p, s);
    double mf = factorial(m);
    double d1 = diff_apply(p, s).coeffs[0](0, 0).real() / mf;
    double d2 = diff_apply(s, p).coeffs[0](0, 0).real() / mf;
    double sc = std::max(1.0, std::abs(ap));
    worst_pair = std::max({worst_pair, std::abs(ap - d1) / sc, std::abs(ap - d2) / sc});
  }
  for (int c = 0; c < cones; ++c) {
    ConeElement f = rand_cone(rng);
    GammaResult g = gamma_functional(f);
    worst_gamma = std::max(worst_gamma, g.max_discrepancy);
    ConeElement back = functional_to_cone(g.functional, rerepresent(f, rng));
    MatHomPoly a = f.polynomial(), b = back.polynomial();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
      num = std::max(num, (a.coeffs[i] - b.coeffs[i]).frobenius_norm());
      den = std::max(den, a.coeffs[i].frobenius_norm());
    }
    worst_cone = std::max(worst_cone, num / std::max(den, 1.0));
  }
  r.pass = worst_pair <= 1e-8 && worst_gamma <= 1e-9 && worst_cone <= 1e-9;
  r.detail = std::to_string(pairs) + " pairs " + fmt(worst_pair) + ", gamma paths " + fmt(worst_gamma) +
             ", cone round trip " + fmt(worst_cone);
  return finish(r, t0);
}

CheckResult laplacian_example(int polys, std::uint64_t seed) {
  auto t0 = Clock::now();
  CheckResult r{11, "Laplacian example", true, "", 0};
  Rng rng(seed);
  double worst = 0;
  for (std::size_t d : {2u, 3u})
    for (int n : {1, 2}) {
      std::size_t q = 2;
      HermMat c = rand_psd(q, q, rng);
      MatHomPoly f = norm_power(d, n, c);
      ConeElement cone{d, 2 * n, q, {}};
      for (const auto& t : norm_power_decomposition(d, n)) cone.terms.push_back({t.eta, t.c(0, 0).real() * c});
      PolyFunctional gam = gamma_functional(cone).functional;
      for (int k = 0; k < polys; ++k) {
        MatHomPoly p = rand_poly(d, 2 * n, q, rng);
        MatHomPoly lp = p;
        for (int i = 0; i < n; ++i) lp = laplacian(lp);
        double lhs = trace_inner(c, lp.coeffs[0]) / factorial(2 * n);
        double rhs = apolar_product(p, f);
        double via_cone = eval_functional(gam, p);
        double sc = std::max(1.0, std::abs(lhs));
        worst = std::max({worst, std::abs(lhs - rhs) / sc, std::abs(lhs - via_cone) / sc});
      }
    }
  r.pass = worst <= 1e-9;
  r.detail = "d in {2,3}, n in {1,2}, " + std::to_string(polys) + " polynomials each, max rel err " + fmt(worst);
  return finish(r, t0);
}

std::vector<CheckResult> run_suite(const SuiteOptions& opts) {
  auto count = [&](int full) { return std::max(1, static_cast<int>(std::lround(full * opts.fraction))); };
  std::uint64_t s = opts.seed;
  std::vector<CheckResult> out;
  out.push_back(hankel_identity(count(500), s + 1));
  out.push_back(positivity_equivalence(count(100), 500, s + 2));
  out.push_back(flat_round_trip(count(50), s + 3));
  out.push_back(richter_reduction(count(100), s + 4));
  out.push_back(example_e1012());
  out.push_back(example_e1802(opts.fraction >= 1.0 ? 9 : 5));
  out.push_back(ordered_maximal(count(20), 64, s + 7));
  out.push_back(commutative_loop(count(50), s + 8));
  out.push_back(transport_identities(count(100), s + 9));
  out.push_back(apolar_duality(count(500), count(100), s + 10));
  out.push_back(laplacian_example(count(100), s + 11));
  return out;
}

}  // namespace matmoment::selftest
