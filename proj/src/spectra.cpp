#include "matmoment/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "matmoment/error.hpp"
#include "matmoment/kernels.hpp"
#include "matmoment/linalg.hpp"

namespace matmoment {

const char* status_name(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::kFeasible: return "feasible";
    case FeasibilityStatus::kInfeasible: return "infeasible";
    case FeasibilityStatus::kInconclusive: return "inconclusive";
  }
  return "?";
}

const char* engine_name(Engine e) { return e == Engine::kDykstra ? "dykstra" : "barrier"; }

struct Spectrahedron::Cache {
  std::set<std::string> pinned;
  std::vector<std::size_t> free_points;
  std::vector<long> free_slot;  // per space point, -1 when pinned
  std::size_t qq = 0;
  std::size_t n = 0;            // free variables
  RMatrix a_free;               // dim x n
  RMatrix pinv;                 // n x dim
  RMatrix projector;            // n x n, onto ker a_free
  RMatrix null;                 // n x k
  double a_norm = 0;
};

namespace {

std::shared_ptr<const Spectrahedron::Cache> build_cache(const MatrixFunctionSpace& space,
                                                        const std::vector<Pin>& pins) {
  auto c = std::make_shared<Spectrahedron::Cache>();
  for (const auto& p : pins) {
    space.space().index_of(p.point);
    if (!c->pinned.insert(p.point).second) throw Error(Errc::kInvalidInput, "point pinned twice: " + p.point);
  }
  std::size_t npts = space.space().size();
  c->qq = space.q() * space.q();
  c->free_slot.assign(npts, -1);
  for (std::size_t x = 0; x < npts; ++x)
    if (!c->pinned.count(space.space().point(x).label)) {
      c->free_slot[x] = static_cast<long>(c->free_points.size());
      c->free_points.push_back(x);
    }
  c->n = c->free_points.size() * c->qq;
  std::size_t dim = space.dim();
  const RMatrix& full = space.constraint_matrix();
  c->a_free = RMatrix(dim, c->n);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t f = 0; f < c->free_points.size(); ++f)
      for (std::size_t k = 0; k < c->qq; ++k) c->a_free(i, f * c->qq + k) = full(i, c->free_points[f] * c->qq + k);
  c->pinv = RMatrix(c->n, dim);
  c->projector = RMatrix(c->n, c->n);
  c->null = RMatrix(c->n, 0);
  if (c->n == 0 || dim == 0) {
    for (std::size_t i = 0; i < c->n; ++i) c->projector(i, i) = 1.0;
    c->null = RMatrix(c->n, c->n);
    for (std::size_t i = 0; i < c->n; ++i) c->null(i, i) = 1.0;
    return c;
  }
  Svd d = svd(to_complex(c->a_free));
  c->a_norm = d.s.empty() ? 0.0 : d.s.front();
  double cut = rank_cutoff(d, dim, c->n);
  std::vector<std::size_t> range;
  for (std::size_t k = 0; k < d.s.size(); ++k)
    if (d.s[k] > cut) range.push_back(k);
  for (std::size_t i = 0; i < c->n; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      double s = 0;
      for (std::size_t k : range) s += d.v(i, k).real() * d.u(j, k).real() / d.s[k];
      c->pinv(i, j) = s;
    }
  CMatrix ns = orthogonal_complement(d.v.columns(range));
  c->null = real_part(ns);
  for (std::size_t i = 0; i < c->n; ++i)
    for (std::size_t j = 0; j < c->n; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < c->null.cols; ++k) s += c->null(i, k) * c->null(j, k);
      c->projector(i, j) = s;
    }
  return c;
}

double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct FreeHalfspace {
  std::size_t slot;        // free point slot
  std::vector<double> a;   // H_jk coordinates of the direction
  double an;               // ||a||
  double bound;
};

// Problem data shared by both engines after pins are folded into the right-hand side.
struct Reduced {
  const Spectrahedron::Cache* c = nullptr;
  std::size_t q = 0;
  std::vector<double> b;       // dim
  std::vector<double> y0;      // least-norm solution, n
  double residual = 0;         // ||A y0 - b||
  bool consistent = true;
  std::vector<FreeHalfspace> hs;
  bool pinned_violation = false;
  bool pinned_not_psd = false;
  double sigma = 1;
};

Reduced reduce(const Spectrahedron& s, const FeasibilityOptions& opts) {
  const auto& c = s.cache();
  const MatrixFunctionSpace& sp = s.space();
  Reduced r;
  r.c = &c;
  r.q = sp.q();
  std::size_t dim = sp.dim();
  r.b = s.target().values;
  const RMatrix& full = sp.constraint_matrix();
  double pin_norm = 0;
  for (const auto& p : s.pins()) {
    if (p.mass.dim() != sp.q()) throw Error(Errc::kDimensionMismatch, "pinned mass has wrong size");
    if (!psd_check(p.mass, 1e-12)) r.pinned_not_psd = true;
    std::size_t x = sp.space().index_of(p.point);
    std::vector<double> m = hjk_coords(p.mass);
    pin_norm += trace_inner(p.mass, p.mass);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < c.qq; ++k) r.b[i] -= full(i, x * c.qq + k) * m[k];
  }
  pin_norm = std::sqrt(pin_norm);
  r.y0.assign(c.n, 0.0);
  if (c.n > 0) kernels::affine_map(c.pinv, r.b.data(), nullptr, r.y0.data());
  std::vector<double> ay(dim, 0.0);
  if (c.n > 0) kernels::affine_map(c.a_free, r.y0.data(), nullptr, ay.data());
  for (std::size_t i = 0; i < dim; ++i) ay[i] -= r.b[i];
  r.residual = norm2(ay);
  double bnorm = norm2(s.target().values);
  double ref = bnorm + c.a_norm * pin_norm;
  r.consistent = r.residual <= 1e-9 * std::max(ref, 1e-300) || r.residual == 0.0;

  double y0n = norm2(r.y0);
  r.sigma = opts.scale > 0 ? opts.scale : std::max(y0n, pin_norm);
  if (!(r.sigma > 0)) r.sigma = 1;

  for (const auto& h : s.halfspaces()) {
    std::size_t x = sp.space().index_of(h.point);
    if (h.direction.dim() != sp.q()) throw Error(Errc::kDimensionMismatch, "halfspace direction has wrong size");
    if (c.free_slot[x] < 0) {
      for (const auto& p : s.pins())
        if (p.point == h.point && trace_inner(p.mass, h.direction) < h.bound - opts.tol * r.sigma)
          r.pinned_violation = true;
      continue;
    }
    FreeHalfspace fh;
    fh.slot = static_cast<std::size_t>(c.free_slot[x]);
    fh.a = hjk_coords(h.direction);
    fh.an = norm2(fh.a);
    fh.bound = h.bound;
    if (fh.an == 0) {
      if (h.bound > opts.tol * r.sigma) r.pinned_violation = true;
      continue;
    }
    r.hs.push_back(std::move(fh));
  }
  return r;
}

AtomicMeasure assemble(const Spectrahedron& s, const std::vector<double>& y) {
  const auto& c = s.cache();
  const auto& pts = s.space().space();
  AtomicMeasure nu;
  for (std::size_t x = 0; x < pts.size(); ++x) {
    const Point& p = pts.point(x);
    if (c.free_slot[x] >= 0) {
      HermMat m = from_hjk_coords(s.space().q(), &y[static_cast<std::size_t>(c.free_slot[x]) * c.qq]);
      nu.atoms.push_back({p.label, psd_project(m), p.coords});
    } else {
      for (const auto& pin : s.pins())
        if (pin.point == p.label) nu.atoms.push_back({p.label, pin.mass, p.coords});
    }
  }
  return nu;
}

double affine_distance(const Reduced& r, const std::vector<double>& y) {
  const auto& c = *r.c;
  std::size_t dim = r.b.size();
  if (c.n == 0) return r.residual;
  std::vector<double> ay(dim), corr(c.n);
  kernels::affine_map(c.a_free, y.data(), nullptr, ay.data());
  for (std::size_t i = 0; i < dim; ++i) ay[i] -= r.b[i];
  kernels::affine_map(c.pinv, ay.data(), nullptr, corr.data());
  return norm2(corr);
}

double halfspace_distance(const Reduced& r, const std::vector<double>& y) {
  double worst = 0;
  for (const auto& h : r.hs) {
    double v = 0;
    for (std::size_t k = 0; k < h.a.size(); ++k) v += h.a[k] * y[h.slot * r.c->qq + k];
    worst = std::max(worst, (h.bound - v) / h.an);
  }
  return worst;
}

FeasibilityReport early_exit(const Reduced& r, const FeasibilityOptions& opts, FeasibilityReport rep) {
  rep.engine = opts.engine;
  if (r.pinned_not_psd) {
    rep.status = FeasibilityStatus::kInfeasible;
    rep.confidence = 1;
    rep.note = "pinned mass is not PSD";
    return rep;
  }
  if (r.pinned_violation) {
    rep.status = FeasibilityStatus::kInfeasible;
    rep.confidence = 1;
    rep.note = "pinned mass violates a halfspace";
    return rep;
  }
  if (!r.consistent) {
    rep.status = FeasibilityStatus::kInfeasible;
    rep.confidence = 1;
    rep.distance = r.residual / std::max(r.c->a_norm, 1e-300);
    rep.note = "moment equations are inconsistent";
    return rep;
  }
  rep.status = FeasibilityStatus::kInconclusive;
  return rep;
}

FeasibilityReport run_dykstra(const Spectrahedron& s, const Reduced& r, const FeasibilityOptions& opts) {
  const auto& c = *r.c;
  FeasibilityReport rep;
  rep.engine = Engine::kDykstra;
  std::size_t n = c.n, q = r.q;
  std::size_t blocks = c.free_points.size();
  double tol_abs = opts.tol * r.sigma;

  std::vector<double> x = r.y0;
  std::vector<double> p_aff(n, 0.0), p_psd(n, 0.0), tmp(n), before(n);
  std::vector<std::vector<double>> p_hs(r.hs.size(), std::vector<double>(n, 0.0));
  std::vector<double> history;
  double prev_gap = -1;
  for (int it = 1; it <= opts.max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + p_aff[i];
    kernels::affine_map(c.projector, tmp.data(), r.y0.data(), x.data());
    for (std::size_t i = 0; i < n; ++i) p_aff[i] = tmp[i] - x[i];
    for (std::size_t h = 0; h < r.hs.size(); ++h) {
      const auto& hs = r.hs[h];
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + p_hs[h][i];
      double v = 0;
      for (std::size_t k = 0; k < hs.a.size(); ++k) v += hs.a[k] * tmp[hs.slot * c.qq + k];
      x = tmp;
      if (v < hs.bound) {
        double t = (hs.bound - v) / (hs.an * hs.an);
        for (std::size_t k = 0; k < hs.a.size(); ++k) x[hs.slot * c.qq + k] += t * hs.a[k];
      }
      for (std::size_t i = 0; i < n; ++i) p_hs[h][i] = tmp[i] - x[i];
    }
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + p_psd[i];
    before = x;
    x = tmp;
    kernels::psd_project_blocks(x.data(), blocks, q);
    for (std::size_t i = 0; i < n; ++i) p_psd[i] = tmp[i] - x[i];

    double gap = 0;
    for (std::size_t i = 0; i < n; ++i) gap += (x[i] - before[i]) * (x[i] - before[i]);
    gap = std::sqrt(gap);
    if (it > 2 && gap > prev_gap * (1 + 1e-9) + 1e-15 * r.sigma) ++rep.monotonicity_faults;
    prev_gap = gap;

    double dist = std::max(affine_distance(r, x), halfspace_distance(r, x));
    history.push_back(dist);
    rep.iterations = it;
    rep.distance = dist;
    if (dist <= tol_abs) {
      rep.status = FeasibilityStatus::kFeasible;
      rep.confidence = 1;
      rep.witness = assemble(s, x);
      return rep;
    }
    if (it > 200 && dist > 10 * tol_abs) {
      double old = history[history.size() - 201];
      if (old - dist <= 1e-6 * old) {
        rep.status = FeasibilityStatus::kInfeasible;
        rep.confidence = std::max(0.0, 1.0 - 10 * tol_abs / dist);
        rep.note = "distance stalled";
        return rep;
      }
    }
  }
  rep.status = FeasibilityStatus::kInconclusive;
  rep.note = "iteration budget exhausted";
  return rep;
}

// Small complex Cholesky S = L L*; false when S is not positive definite.
bool cholesky(const CMatrix& s, CMatrix& l) {
  std::size_t q = s.rows();
  l = CMatrix(q, q);
  for (std::size_t j = 0; j < q; ++j) {
    double d = s(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0)) return false;
    d = std::sqrt(d);
    l(j, j) = d;
    for (std::size_t i = j + 1; i < q; ++i) {
      Complex v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * std::conj(l(j, k));
      l(i, j) = v / d;
    }
  }
  return true;
}

// L^{-1} X for lower-triangular L.
CMatrix lower_solve(const CMatrix& l, const CMatrix& x) {
  std::size_t q = l.rows();
  CMatrix y(q, x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c)
    for (std::size_t i = 0; i < q; ++i) {
      Complex v = x(i, c);
      for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * y(k, c);
      y(i, c) = v / l(i, i);
    }
  return y;
}

// K = L^{-1} D L^{-*}.
CMatrix congruence(const CMatrix& l, const CMatrix& d) {
  CMatrix y = lower_solve(l, d);
  return lower_solve(l, y.adjoint()).adjoint();
}

double real_inner(const CMatrix& a, const CMatrix& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) s += (a.data()[i] * std::conj(b.data()[i])).real();
  return s;
}

struct Barrier {
  const Reduced& r;
  std::size_t q, k, blocks;
  std::vector<CMatrix> base;                // per block, y0 / sigma
  std::vector<std::vector<CMatrix>> dirs;   // per block, per null column
  std::vector<double> hs_base;              // per halfspace, (a.y0 - bound) / sigma
  std::vector<std::vector<double>> hs_dir;  // per halfspace, a.N_j
  double cap = 1.0;
  double r2 = 1e8;
  double y0s2 = 0;
  double s = 1.0;

  explicit Barrier(const Reduced& red) : r(red) {
    const auto& c = *r.c;
    q = r.q;
    k = c.null.cols;
    blocks = c.free_points.size();
    base.resize(blocks);
    dirs.assign(blocks, std::vector<CMatrix>(k));
    for (std::size_t b = 0; b < blocks; ++b) {
      std::vector<double> v(c.qq);
      for (std::size_t t = 0; t < c.qq; ++t) v[t] = r.y0[b * c.qq + t] / r.sigma;
      base[b] = from_hjk_coords(q, v).matrix();
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t t = 0; t < c.qq; ++t) v[t] = c.null(b * c.qq + t, j);
        dirs[b][j] = from_hjk_coords(q, v).matrix();
      }
    }
    for (const auto& h : r.hs) {
      double v = 0;
      for (std::size_t t = 0; t < c.qq; ++t) v += h.a[t] * r.y0[h.slot * c.qq + t];
      hs_base.push_back((v - h.bound) / r.sigma);
      std::vector<double> dj(k, 0.0);
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t t = 0; t < c.qq; ++t) dj[j] += h.a[t] * c.null(h.slot * c.qq + t, j);
      hs_dir.push_back(dj);
    }
    for (double v : r.y0) y0s2 += (v / r.sigma) * (v / r.sigma);
    r2 = std::max(1e8, 100 * y0s2);
  }

  CMatrix block(std::size_t b, const std::vector<double>& z) const {
    CMatrix m = base[b];
    for (std::size_t j = 0; j < k; ++j)
      if (z[j] != 0.0) m += Complex(z[j]) * dirs[b][j];
    return m;
  }

  double hs_value(std::size_t h, const std::vector<double>& z, double t) const {
    double v = hs_base[h];
    for (std::size_t j = 0; j < k; ++j) v += hs_dir[h][j] * z[j];
    return v - t * r.hs[h].an;
  }

  double ball(const std::vector<double>& z) const {
    double s2 = 0;
    for (double v : z) s2 += v * v;
    return r2 - y0s2 - s2;
  }

  // Largest t with all blocks - tI PSD and halfspaces satisfied at this z.
  double margin(const std::vector<double>& z) const {
    double t = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < blocks; ++b) t = std::min(t, min_eigenvalue(HermMat::hermitian_part(block(b, z))));
    for (std::size_t h = 0; h < r.hs.size(); ++h) t = std::min(t, hs_value(h, z, 0.0) / r.hs[h].an);
    return t;
  }

  double nu() const { return static_cast<double>(blocks * q + r.hs.size() + 2); }

  // Barrier value; +inf outside the domain.
  double value(const std::vector<double>& z, double t) const {
    double f = -s * t;
    for (std::size_t b = 0; b < blocks; ++b) {
      CMatrix m = block(b, z);
      for (std::size_t i = 0; i < q; ++i) m(i, i) -= t;
      CMatrix l;
      if (!cholesky(m, l)) return std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < q; ++i) f -= 2 * std::log(l(i, i).real());
    }
    for (std::size_t h = 0; h < r.hs.size(); ++h) {
      double g = hs_value(h, z, t);
      if (!(g > 0)) return std::numeric_limits<double>::infinity();
      f -= std::log(g);
    }
    if (!(cap - t > 0)) return std::numeric_limits<double>::infinity();
    f -= std::log(cap - t);
    double bl = ball(z);
    if (!(bl > 0)) return std::numeric_limits<double>::infinity();
    f -= std::log(bl);
    return f;
  }

  // Gradient and Hessian over (z, t); returns false outside the domain.
  bool derivatives(const std::vector<double>& z, double t, std::vector<double>& g, std::vector<double>& hm) const {
    std::size_t m = k + 1;
    g.assign(m, 0.0);
    hm.assign(m * m, 0.0);
    g[k] = -s;
    std::vector<CMatrix> kk(m);
    CMatrix neg_i = CMatrix::identity(q);
    neg_i *= -1.0;
    for (std::size_t b = 0; b < blocks; ++b) {
      CMatrix sm = block(b, z);
      for (std::size_t i = 0; i < q; ++i) sm(i, i) -= t;
      CMatrix l;
      if (!cholesky(sm, l)) return false;
      for (std::size_t j = 0; j < k; ++j) kk[j] = congruence(l, dirs[b][j]);
      kk[k] = congruence(l, neg_i);
      for (std::size_t a = 0; a < m; ++a) {
        double tr = 0;
        for (std::size_t i = 0; i < q; ++i) tr += kk[a](i, i).real();
        g[a] -= tr;
        for (std::size_t c = a; c < m; ++c) {
          double v = real_inner(kk[a], kk[c]);
          hm[a * m + c] += v;
          if (c != a) hm[c * m + a] += v;
        }
      }
    }
    std::vector<double> grad_h(m);
    for (std::size_t h = 0; h < r.hs.size(); ++h) {
      double gv = hs_value(h, z, t);
      if (!(gv > 0)) return false;
      for (std::size_t j = 0; j < k; ++j) grad_h[j] = hs_dir[h][j];
      grad_h[k] = -r.hs[h].an;
      for (std::size_t a = 0; a < m; ++a) {
        g[a] -= grad_h[a] / gv;
        for (std::size_t c = 0; c < m; ++c) hm[a * m + c] += grad_h[a] * grad_h[c] / (gv * gv);
      }
    }
    double ct = cap - t;
    if (!(ct > 0)) return false;
    g[k] += 1.0 / ct;
    hm[k * m + k] += 1.0 / (ct * ct);
    double bl = ball(z);
    if (!(bl > 0)) return false;
    for (std::size_t a = 0; a < k; ++a) {
      g[a] += 2 * z[a] / bl;
      hm[a * m + a] += 2.0 / bl;
      for (std::size_t c = 0; c < k; ++c) hm[a * m + c] += 4 * z[a] * z[c] / (bl * bl);
    }
    return true;
  }
};

FeasibilityReport run_barrier(const Spectrahedron& s, const Reduced& r, const FeasibilityOptions& opts) {
  const auto& c = *r.c;
  FeasibilityReport rep;
  rep.engine = Engine::kBarrier;
  Barrier bar(r);
  std::size_t k = bar.k;
  std::vector<double> z(k, 0.0);

  auto finish = [&](double t, FeasibilityStatus st) {
    rep.margin = t * r.sigma;
    rep.status = st;
    rep.confidence = 1;
    if (st == FeasibilityStatus::kFeasible) {
      std::vector<double> y = r.y0;
      for (std::size_t i = 0; i < c.n; ++i)
        for (std::size_t j = 0; j < k; ++j) y[i] += r.sigma * c.null(i, j) * z[j];
      rep.witness = assemble(s, y);
    }
    rep.distance = std::max(0.0, -t) * r.sigma;
    return rep;
  };

  double t0 = bar.blocks == 0 && r.hs.empty() ? 0.0 : bar.margin(z);
  if (t0 >= 0) return finish(t0, FeasibilityStatus::kFeasible);
  if (k == 0) return finish(t0, t0 >= -opts.tol ? FeasibilityStatus::kFeasible : FeasibilityStatus::kInfeasible);

  double t = t0 - 1.0;
  bar.cap = 1.0;
  double gap_target = std::max(1e-3 * opts.tol, 1e-14);
  std::size_t m = k + 1;
  std::vector<double> g, hm, step(m), zn(k);
  int newton = 0;
  const int max_newton = std::max(200, opts.max_iter / 20);
  while (true) {
    // Centering.
    for (int inner = 0; inner < 100; ++inner) {
      if (!bar.derivatives(z, t, g, hm)) break;
      step = g;
      for (double& v : step) v = -v;
      double ridge = 0;
      double trace = 0;
      for (std::size_t a = 0; a < m; ++a) trace += hm[a * m + a];
      std::vector<double> hreg = hm;
      while (!cholesky_solve(hreg, m, step)) {
        ridge = ridge == 0 ? 1e-14 * std::max(trace, 1e-300) : ridge * 100;
        hreg = hm;
        for (std::size_t a = 0; a < m; ++a) hreg[a * m + a] += ridge;
        step = g;
        for (double& v : step) v = -v;
        if (ridge > trace) break;
      }
      double dec = 0;
      for (std::size_t a = 0; a < m; ++a) dec -= g[a] * step[a];
      ++newton;
      if (dec < 1e-10) break;
      double f0 = bar.value(z, t);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        for (std::size_t j = 0; j < k; ++j) zn[j] = z[j] + alpha * step[j];
        double tn = t + alpha * step[k];
        double f1 = bar.value(zn, tn);
        if (f1 <= f0 - 0.25 * alpha * dec) {
          z = zn;
          t = tn;
          moved = true;
          break;
        }
      }
      if (!moved || newton > max_newton) break;
      if (t >= 0) break;
    }
    rep.iterations = newton;
    if (t >= 0) return finish(t, FeasibilityStatus::kFeasible);
    double bound = t + 2 * bar.nu() / bar.s;
    if (bound < -opts.tol) return finish(t, FeasibilityStatus::kInfeasible);
    if (bar.nu() / bar.s < gap_target || newton > max_newton) {
      if (t >= -opts.tol) return finish(t, FeasibilityStatus::kFeasible);
      if (newton > max_newton) {
        rep.status = FeasibilityStatus::kInconclusive;
        rep.margin = t * r.sigma;
        rep.note = "Newton budget exhausted";
        return rep;
      }
      return finish(t, FeasibilityStatus::kInfeasible);
    }
    bar.s *= 20;
  }
}

}  // namespace

Spectrahedron::Spectrahedron(std::shared_ptr<const MatrixFunctionSpace> space, MomentFunctional target,
                             std::vector<Halfspace> halfspaces, std::vector<Pin> pins)
    : Spectrahedron(space, std::move(target), std::move(halfspaces), pins, build_cache(*space, pins)) {}

Spectrahedron::Spectrahedron(std::shared_ptr<const MatrixFunctionSpace> space, MomentFunctional target,
                             std::vector<Halfspace> halfspaces, std::vector<Pin> pins,
                             std::shared_ptr<const Cache> cache)
    : space_(std::move(space)),
      target_(std::move(target)),
      halfspaces_(std::move(halfspaces)),
      pins_(std::move(pins)),
      cache_(std::move(cache)) {
  if (target_.values.size() != space_->dim())
    throw Error(Errc::kDimensionMismatch, "target functional does not match the space");
}

Spectrahedron Spectrahedron::rebind(MomentFunctional target, std::vector<Halfspace> halfspaces,
                                    std::vector<Pin> pins) const {
  std::set<std::string> pinned;
  for (const auto& p : pins) pinned.insert(p.point);
  if (pinned == cache_->pinned && pinned.size() == pins.size())
    return Spectrahedron(space_, std::move(target), std::move(halfspaces), std::move(pins), cache_);
  return Spectrahedron(space_, std::move(target), std::move(halfspaces), std::move(pins));
}

FeasibilityReport feasible(const Spectrahedron& s, const FeasibilityOptions& opts) {
  Reduced r = reduce(s, opts);
  FeasibilityReport rep = early_exit(r, opts, FeasibilityReport{});
  if (rep.status != FeasibilityStatus::kInconclusive) return rep;
  if (opts.engine == Engine::kBarrier) return run_barrier(s, r, opts);
  if (s.cache().n == 0) {
    FeasibilityReport out;
    out.status = FeasibilityStatus::kFeasible;
    out.confidence = 1;
    out.witness = assemble(s, {});
    return out;
  }
  return run_dykstra(s, r, opts);
}

FeasibilityReport is_moment_functional(const MomentFunctional& lambda, const FeasibilityOptions& opts) {
  if (!lambda.domain) throw Error(Errc::kInvalidInput, "functional has no domain");
  if (!lambda.domain->unit()) throw Error(Errc::kMissingUnit, "space has no unit element");
  Spectrahedron s(lambda.domain, lambda);
  return feasible(s, opts);
}

double witness_error(const Spectrahedron& s, const AtomicMeasure& nu) {
  MomentFunctional back = functional_from_measure(s.space_ptr(), nu);
  double err = relative_error(back.values, s.target().values);
  if (s.target().norm() == 0) err = norm2(back.values);
  for (const auto& p : s.pins())
    for (const auto& a : nu.atoms)
      if (a.label == p.point) err = std::max(err, (a.mass - p.mass).frobenius_norm());
  for (const auto& h : s.halfspaces())
    for (const auto& a : nu.atoms)
      if (a.label == h.point) err = std::max(err, h.bound - trace_inner(a.mass, h.direction));
  return err;
}

std::optional<std::vector<double>> positivity_violation_search(const MomentFunctional& lambda, int trials,
                                                               std::uint64_t seed, double tol) {
  const MatrixFunctionSpace& sp = *lambda.domain;
  std::size_t npts = sp.space().size(), q = sp.q(), dim = sp.dim();
  double lnorm = lambda.norm();
  if (dim == 0 || lnorm == 0) return std::nullopt;
  auto violates = [&](const std::vector<double>& c) {
    return eval_functional(lambda, c) < -tol * lnorm * norm2(c);
  };
  if (sp.unit() && violates(sp.unit()->coeffs)) return sp.unit()->coeffs;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<HermMat> table(npts, HermMat(q));
    bool single = ud(rng) < 0.4;
    std::size_t chosen = static_cast<std::size_t>(ud(rng) * npts) % npts;
    for (std::size_t x = 0; x < npts; ++x) {
      if (single ? x != chosen : ud(rng) < 0.5) continue;
      std::size_t terms = 1 + static_cast<std::size_t>(ud(rng) * q);
      for (std::size_t t = 0; t < terms; ++t) {
        CVector v(q);
        for (auto& z : v) z = Complex(nd(rng), nd(rng));
        table[x] += std::exp(nd(rng)) * HermMat::outer(v);
      }
    }
    std::vector<double> c = sp.coefficients_of(table);
    double fn = 0;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < npts; ++x) {
      HermMat f = sp.evaluate(c, x);
      fn = std::max(fn, f.frobenius_norm());
      lo = std::min(lo, min_eigenvalue(f));
    }
    if (lo < 0) {
      if (!sp.unit()) continue;
      double shift = (-lo + 1e-12 * std::max(fn, 1e-300)) / sp.unit()->epsilon;
      for (std::size_t i = 0; i < dim; ++i) c[i] += shift * sp.unit()->coeffs[i];
    }
    bool psd = true;
    for (std::size_t x = 0; x < npts && psd; ++x) psd = min_eigenvalue(sp.evaluate(c, x)) >= 0;
    if (psd && violates(c)) return c;
  }
  return std::nullopt;
}

}  // namespace matmoment
