#include "matmoment/masses.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "matmoment/error.hpp"
#include "matmoment/linalg.hpp"

namespace matmoment {

namespace {

const UnitElement& require_unit(const MomentFunctional& lambda) {
  if (!lambda.domain) throw Error(Errc::kInvalidInput, "functional has no domain");
  if (!lambda.domain->unit()) throw Error(Errc::kMissingUnit, "space has no unit element");
  return *lambda.domain->unit();
}

MassOptions with_scale(const MomentFunctional& lambda, MassOptions opts) {
  if (!(opts.scale > 0)) opts.scale = mass_scale(lambda);
  return opts;
}

bool accepted(const FeasibilityReport& r) { return r.status == FeasibilityStatus::kFeasible; }

HermMat mass_at(const AtomicMeasure& nu, const std::string& point, std::size_t q) {
  for (const auto& a : nu.atoms)
    if (a.label == point) return a.mass;
  return HermMat(q);
}

// Last feasible value in [lo, hi]; pred(lo) is assumed true.
template <typename Pred>
double bisect(double lo, double hi, double width, Pred pred) {
  while (hi - lo > width) {
    double mid = 0.5 * (lo + hi);
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::vector<HermMat> sweep_directions(std::size_t q) {
  std::vector<HermMat> out;
  for (std::size_t j = 0; j < q; ++j) {
    CVector v(q);
    v[j] = 1.0;
    out.push_back(HermMat::outer(v));
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t k = j + 1; k < q; ++k) {
      CVector v(q), w(q);
      v[j] = r;
      v[k] = r;
      w[j] = r;
      w[k] = Complex(0, r);
      out.push_back(HermMat::outer(v));
      out.push_back(HermMat::outer(w));
    }
  return out;
}

HermMat random_direction(std::size_t q, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVector v(q);
  double n = 0;
  for (auto& z : v) {
    z = Complex(nd(rng), nd(rng));
    n += std::norm(z);
  }
  n = std::sqrt(n);
  for (auto& z : v) z /= n;
  return HermMat::outer(v);
}

bool is_moment(const MomentFunctional& lambda, const MassOptions& opts) {
  return accepted(feasible(Spectrahedron(lambda.domain, lambda), feasibility_options(opts)));
}

}  // namespace

FeasibilityOptions feasibility_options(const MassOptions& opts) {
  FeasibilityOptions f;
  f.tol = opts.tol;
  f.engine = opts.engine;
  f.scale = opts.scale;
  return f;
}

double mass_scale(const MomentFunctional& lambda) {
  const RMatrix& a = lambda.domain->constraint_matrix();
  if (a.rows == 0 || a.cols == 0) return 1.0;
  CMatrix b(a.rows, 1);
  for (std::size_t i = 0; i < a.rows; ++i) b(i, 0) = lambda.values[i];
  double n = lstsq(to_complex(a), b).frobenius_norm();
  return n > 0 ? n : 1.0;
}

MomentFunctional subtract_mass(const MomentFunctional& lambda, const std::string& point, const HermMat& m) {
  const MatrixFunctionSpace& sp = *lambda.domain;
  std::size_t x = sp.space().index_of(point);
  MomentFunctional out = lambda;
  for (std::size_t i = 0; i < sp.dim(); ++i) out.values[i] -= trace_inner(sp.value(i, x), m);
  return out;
}

FeasibilityReport mass_membership(const MassQuery& q, const MassOptions& opts) {
  require_unit(q.lambda);
  if (!psd_check(q.candidate, 1e-12)) throw Error(Errc::kInvalidInput, "candidate mass is not PSD");
  MassOptions o = with_scale(q.lambda, opts);
  Spectrahedron s(q.lambda.domain, q.lambda, {}, {Pin{q.point, q.candidate}});
  return feasible(s, feasibility_options(o));
}

FeasibilityReport penumbra_membership(const MassQuery& q, const MassOptions& opts) {
  require_unit(q.lambda);
  if (!psd_check(q.candidate, 1e-12)) throw Error(Errc::kInvalidInput, "candidate mass is not PSD");
  MassOptions o = with_scale(q.lambda, opts);
  MomentFunctional shifted = subtract_mass(q.lambda, q.point, q.candidate);
  return feasible(Spectrahedron(q.lambda.domain, shifted), feasibility_options(o));
}

double scaling_I(const MomentFunctional& lambda, const std::string& point, const HermMat& m,
                 const MassOptions& opts) {
  const UnitElement& unit = require_unit(lambda);
  if (m.frobenius_norm() == 0) throw Error(Errc::kZeroMatrix, "scaling_I needs a nonzero matrix");
  if (!psd_check(m, 1e-12)) throw Error(Errc::kInvalidInput, "matrix is not PSD");
  MassOptions o = with_scale(lambda, opts);
  double upper = eval_functional(lambda, unit.coeffs) / (unit.epsilon * m.trace());
  if (!(upper > 0)) return 0.0;
  Spectrahedron base(lambda.domain, lambda);
  auto fo = feasibility_options(o);
  auto pred = [&](double t) {
    return accepted(feasible(base.rebind(subtract_mass(lambda, point, t * m), {}, {}), fo));
  };
  if (!accepted(feasible(base, fo))) throw Error(Errc::kNotRepresenting, "functional is not a moment functional");
  if (pred(upper)) return upper;
  return bisect(0.0, upper, o.bisect_tol * upper, pred);
}

SupTrace sup_trace(const MomentFunctional& lambda, const std::string& point, const MassOptions& opts) {
  const UnitElement& unit = require_unit(lambda);
  MassOptions o = with_scale(lambda, opts);
  std::size_t q = lambda.domain->q();
  lambda.domain->space().index_of(point);
  auto fo = feasibility_options(o);
  Spectrahedron base(lambda.domain, lambda);
  FeasibilityReport r0 = feasible(base, fo);
  if (!accepted(r0)) throw Error(Errc::kNotRepresenting, "functional is not a moment functional");
  SupTrace out;
  out.mass = mass_at(*r0.witness, point, q);
  out.value = std::max(0.0, out.mass.trace());
  double upper = eval_functional(lambda, unit.coeffs) / unit.epsilon;
  if (!(upper > out.value)) return out;
  HermMat id = HermMat::identity(q);
  auto pred = [&](double s) {
    FeasibilityReport r = feasible(base.rebind(lambda, {Halfspace{point, id, s}}, {}), fo);
    if (!accepted(r)) return false;
    HermMat m = mass_at(*r.witness, point, q);
    if (m.trace() > out.mass.trace()) out.mass = m;
    return true;
  };
  double v = pred(upper) ? upper : bisect(out.value, upper, o.bisect_tol * upper, pred);
  out.value = std::max(v, out.mass.trace());
  return out;
}

MaximalMassResult maximal_mass(const MomentFunctional& lambda, const std::string& point,
                               const std::optional<HermMat>& seed, const MassOptions& opts) {
  const UnitElement& unit = require_unit(lambda);
  MassOptions o = with_scale(lambda, opts);
  std::size_t q = lambda.domain->q();
  auto fo = feasibility_options(o);
  Spectrahedron base(lambda.domain, lambda);
  auto moment = [&](const MomentFunctional& f) { return accepted(feasible(base.rebind(f, {}, {}), fo)); };

  HermMat m(q);
  if (seed) {
    if (seed->dim() != q) throw Error(Errc::kDimensionMismatch, "seed has wrong size");
    if (!psd_check(*seed, 1e-12)) throw Error(Errc::kInvalidInput, "seed is not PSD");
    if (!moment(subtract_mass(lambda, point, *seed)))
      throw Error(Errc::kInvalidInput, "seed is not dominated by any achievable mass");
    m = *seed;
  } else {
    FeasibilityReport r = feasible(base, fo);
    if (!accepted(r)) throw Error(Errc::kNotRepresenting, "functional is not a moment functional");
    m = mass_at(*r.witness, point, q);
  }
  double thr = o.step_tol * o.scale;
  if (m.frobenius_norm() > 0) {
    double t = scaling_I(lambda, point, m, o);
    if (t > 1 + o.step_tol) m = t * m;
  }

  std::mt19937_64 rng(o.seed);
  MaximalMassResult out;
  for (int round = 0; round < 50; ++round) {
    out.rounds = round + 1;
    bool improved = false;
    MomentFunctional r = subtract_mass(lambda, point, m);
    try {
      SupTrace st = sup_trace(r, point, o);
      if (st.value > thr) {
        m += st.mass;
        continue;
      }
    } catch (const Error& e) {
      if (e.code() != Errc::kNotRepresenting) throw;
    }
    std::vector<HermMat> dirs = sweep_directions(q);
    for (int p = 0; p < o.probes; ++p) dirs.push_back(random_direction(q, rng));
    std::vector<ProbeCertificate> certs;
    for (const HermMat& d : dirs) {
      if (!moment(subtract_mass(r, point, thr * d))) {
        certs.push_back({d, 0.0});
        continue;
      }
      double upper = std::max(thr, eval_functional(r, unit.coeffs) / (unit.epsilon * d.trace()));
      auto pred = [&](double s) { return moment(subtract_mass(r, point, s * d)); };
      double s = pred(upper) ? upper : bisect(thr, upper, o.bisect_tol * upper, pred);
      m += s * d;
      r = subtract_mass(lambda, point, m);
      certs.push_back({d, s});
      improved = true;
    }
    if (!improved) {
      out.certificates = std::move(certs);
      break;
    }
  }
  out.mass = m;
  return out;
}

std::vector<CoreEntry> core_set(const MomentFunctional& lambda, const MassOptions& opts) {
  require_unit(lambda);
  MassOptions o = with_scale(lambda, opts);
  std::vector<CoreEntry> out;
  for (const Point& p : lambda.domain->space().points()) {
    SupTrace st = sup_trace(lambda, p.label, o);
    out.push_back({p.label, st.value, st.value > o.step_tol * o.scale, st.mass});
  }
  return out;
}

OrderedMaxMassResult ordered_maximal_measure(const MomentFunctional& lambda, const std::optional<std::string>& first,
                                             const MassOptions& opts) {
  require_unit(lambda);
  double lnorm = lambda.norm();
  if (lnorm == 0) throw Error(Errc::kZeroFunctional, "functional is zero");
  MassOptions o = with_scale(lambda, opts);
  const MatrixFunctionSpace& sp = *lambda.domain;
  if (first) sp.space().index_of(*first);
  if (!is_moment(lambda, o)) throw Error(Errc::kNotRepresenting, "functional is not a moment functional");

  OrderedMaxMassResult out;
  MomentFunctional r = lambda;
  for (std::size_t k = 1;; ++k) {
    if (k > sp.dim()) throw Error(Errc::kIterationBoundExceeded, "more atoms than the space dimension");
    std::vector<CoreEntry> core;
    try {
      core = core_set(r, o);
    } catch (const Error& e) {
      if (e.code() != Errc::kNotRepresenting || k == 1) throw;
      break;
    }
    const CoreEntry* pick = nullptr;
    if (k == 1 && first) {
      for (const auto& c : core)
        if (c.point == *first) pick = &c;
      if (!pick->in_core) throw Error(Errc::kNotInCoreSet, "point carries no mass in any representing measure: " + *first);
    } else {
      for (const auto& c : core) {
        if (!c.in_core) continue;
        if (!pick || c.sup_trace > pick->sup_trace + 1e-9 * o.scale ||
            (std::abs(c.sup_trace - pick->sup_trace) <= 1e-9 * o.scale && c.point < pick->point))
          pick = &c;
      }
      if (!pick) break;
    }
    MaximalMassResult mm = maximal_mass(r, pick->point, pick->mass, o);
    const Point& p = sp.space().point(sp.space().index_of(pick->point));
    out.atoms.push_back({p.label, mm.mass, p.coords});
    out.certificates.push_back(std::move(mm.certificates));
    r = subtract_mass(r, pick->point, mm.mass);
    if (r.norm() <= o.residual_tol * lnorm) break;
  }
  out.residual_norm = r.norm();
  return out;
}

LargestMassResult largest_mass_check(const ScalarSpaceE& e, const AtomicMeasure& nu, const std::string& point,
                                     int trials, std::uint64_t seed, double tol) {
  const FiniteSpace& xs = e.space();
  std::size_t x0 = xs.index_of(point);
  bool has_atom = false;
  std::vector<std::size_t> others;
  for (const auto& a : nu.atoms) {
    std::size_t x = xs.index_of(a.label);
    if (a.mass.trace() <= 0) continue;
    if (x == x0) {
      has_atom = true;
    } else {
      others.push_back(x);
    }
  }
  if (!has_atom) throw Error(Errc::kInvalidInput, "point is not an atom of the measure");
  std::size_t dim = e.dim();
  LargestMassResult out;
  if (dim == 0) return out;

  CMatrix null;
  if (others.empty()) {
    null = CMatrix::identity(dim);
  } else {
    CMatrix v(others.size(), dim);
    for (std::size_t r = 0; r < others.size(); ++r)
      for (std::size_t i = 0; i < dim; ++i) v(r, i) = e.value(i, others[r]);
    null = null_space(v);
  }
  std::size_t k = null.cols();
  if (k == 0) {
    out.note = "evaluation at the other atoms has trivial kernel";
    return out;
  }
  auto check = [&](std::vector<double> c) {
    double sup = 0;
    std::vector<double> f(xs.size());
    for (std::size_t x = 0; x < xs.size(); ++x) {
      f[x] = e.evaluate(c, x);
      sup = std::max(sup, std::abs(f[x]));
    }
    if (!(std::abs(f[x0]) > tol * std::max(sup, 1e-300))) return false;
    double sign = f[x0] > 0 ? 1.0 : -1.0;
    for (std::size_t x = 0; x < xs.size(); ++x)
      if (sign * f[x] < -tol * sup) return false;
    for (double& ci : c) ci *= sign / std::abs(f[x0]);
    out.certified = true;
    out.witness = c;
    return true;
  };
  if (others.empty() && e.contains_one() && check(e.one_coefficients())) return out;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> c(dim);
    for (std::size_t i = 0; i < dim; ++i) c[i] = null(i, j).real();
    if (check(c)) return out;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> c(dim, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      double g = nd(rng);
      for (std::size_t i = 0; i < dim; ++i) c[i] += g * null(i, j).real();
    }
    if (check(c)) return out;
  }
  out.note = "no separating function found";
  return out;
}

LargestMassResult largest_mass_check(const MatrixFunctionSpace& space, const AtomicMeasure& nu,
                                     const std::string& point, int trials, std::uint64_t seed, double tol) {
  if (!space.lift_source()) {
    LargestMassResult out;
    out.note = "space is not a full lift of a scalar space";
    return out;
  }
  return largest_mass_check(*space.lift_source(), nu, point, trials, seed, tol);
}

NoLargestFixture build_nolargest_fixture(const ScalarSpaceE& e, const AtomicMeasure& nu,
                                         const std::vector<double>& couplings, const std::string& point) {
  if (!e.contains_one()) throw Error(Errc::kHypothesisViolated, "the scalar space must contain the constants");
  if (couplings.size() != nu.atoms.size()) throw Error(Errc::kDimensionMismatch, "one coupling per atom");
  const FiniteSpace& xs = e.space();
  std::size_t x0 = xs.index_of(point);
  AtomicMeasure mu;
  bool found = false;
  for (std::size_t j = 0; j < nu.atoms.size(); ++j) {
    const Atom& a = nu.atoms[j];
    if (a.mass.dim() != 1) throw Error(Errc::kDimensionMismatch, "scalar measure expected");
    double m = a.mass(0, 0).real(), w = couplings[j];
    if (m < std::abs(w)) throw Error(Errc::kHypothesisViolated, "mass matrix would not be PSD at " + a.label);
    if (a.label == point) {
      found = true;
      if (!(m > 0) || !(m * m - w * w > 0))
        throw Error(Errc::kHypothesisViolated, "mass at the base point must be positive definite");
    }
    CMatrix mm(2, 2);
    mm(0, 0) = m;
    mm(1, 1) = m;
    mm(0, 1) = w;
    mm(1, 0) = w;
    const Point& p = xs.point(xs.index_of(a.label));
    mu.atoms.push_back({a.label, HermMat::from_matrix(mm), p.coords});
  }
  if (!found) throw Error(Errc::kHypothesisViolated, "base point is not an atom");

  auto scalar = std::make_shared<MatrixFunctionSpace>(lift_scalar_space(e, 1));
  MomentFunctional ls = functional_from_measure(scalar, nu);
  double m0 = mass_at(nu, point, 1)(0, 0).real();
  MassOptions so;
  so.scale = mass_scale(ls);
  double sup = sup_trace(ls, point, so).value;
  if (sup > m0 * (1 + 1e-6) + 1e-9 * so.scale)
    throw Error(Errc::kHypothesisViolated, "base mass is not maximal for the scalar functional");

  std::size_t dim = e.dim(), n = xs.size();
  std::vector<std::vector<HermMat>> basis;
  auto table = [&](const std::vector<double>& g, const HermMat& h) {
    std::vector<HermMat> t;
    for (std::size_t x = 0; x < n; ++x) t.push_back(g[x] * h);
    return t;
  };
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t jk : {0u, 2u, 3u}) basis.push_back(table(e.basis()[i], hjk(2, jk / 2, jk % 2)));
  CMatrix row(1, dim);
  for (std::size_t i = 0; i < dim; ++i) row(0, i) = e.value(i, x0);
  CMatrix ns = null_space(row);
  for (std::size_t c = 0; c < ns.cols(); ++c) {
    std::vector<double> g(n, 0.0);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t i = 0; i < dim; ++i) g[x] += ns(i, c).real() * e.value(i, x);
    basis.push_back(table(g, hjk(2, 0, 1)));
  }
  MatrixFunctionSpace plain(xs, 2, basis);
  std::vector<HermMat> ones(n, HermMat::identity(2));
  UnitElement unit{plain.coefficients_of(ones), 1.0};
  NoLargestFixture out;
  out.space = std::make_shared<MatrixFunctionSpace>(xs, 2, basis, unit);
  out.mu = mu;
  out.lambda = functional_from_measure(out.space, mu);
  return out;
}

double convexity_probe(const MomentFunctional& lambda, const std::string& point, const HermMat& y1,
                       const HermMat& y2, int samples, const MassOptions& opts) {
  if (samples <= 0) return 1.0;
  int ok = 0;
  for (int s = 0; s < samples; ++s) {
    double t = samples == 1 ? 0.5 : static_cast<double>(s) / (samples - 1);
    if (accepted(mass_membership({lambda, point, (1 - t) * y1 + t * y2}, opts))) ++ok;
  }
  return static_cast<double>(ok) / samples;
}

ClosednessProbe closedness_probe(const MomentFunctional& lambda, const std::string& point, const HermMat& start,
                                 const HermMat& limit, int steps, const MassOptions& opts) {
  ClosednessProbe out;
  for (int k = 1; k <= steps; ++k) {
    HermMat y = limit + std::ldexp(1.0, -k) * (start - limit);
    out.sequence_accepted.push_back(accepted(penumbra_membership({lambda, point, y}, opts)));
  }
  out.limit_accepted = accepted(penumbra_membership({lambda, point, limit}, opts));
  return out;
}

}  // namespace matmoment
