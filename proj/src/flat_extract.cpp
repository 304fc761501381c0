#include "matmoment/flat_extract.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "matmoment/error.hpp"
#include "matmoment/kernels.hpp"
#include "matmoment/linalg.hpp"

namespace matmoment {

AtomicMeasure ExtractionResult::measure() const {
  AtomicMeasure nu;
  for (std::size_t p = 0; p < points.size(); ++p) nu.atoms.push_back({"p" + std::to_string(p), masses[p], points[p]});
  return nu;
}

MomentSequence moments_from_measure(const AtomicMeasure& nu, int n, std::size_t d, std::size_t q) {
  kernels::MomentJob job;
  job.d = d;
  for (const auto& a : nu.atoms) {
    if (a.coords.size() != d) throw Error(Errc::kMissingCoordinates, "atom '" + a.label + "' lacks d coordinates");
    if (a.mass.dim() != q) throw Error(Errc::kDimensionMismatch, "atom mass has wrong size");
    job.coords.push_back(a.coords);
    job.masses.push_back(a.mass);
  }
  MultiIndexSet idx(d, n);
  job.alphas = idx.indices();
  return MomentSequence(d, q, n, kernels::accumulate_moments(job, q));
}

MomentSequence moments_from_measure(const AtomicMeasure& nu, int n) {
  if (nu.atoms.empty()) throw Error(Errc::kMissingCoordinates, "empty measure: pass d and q explicitly");
  return moments_from_measure(nu, n, nu.atoms.front().coords.size(), nu.q());
}

namespace {

// Pivoted Cholesky on H restricted to candidate columns; prefers earlier candidates.
std::vector<std::size_t> select_columns(const CMatrix& h, const std::vector<std::size_t>& cand, std::size_t r) {
  std::size_t n = cand.size();
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = h(cand[i], cand[i]).real();
  std::vector<CVector> l;  // columns of the partial factor, indexed by candidate
  std::vector<std::size_t> picked;
  std::vector<bool> used(n, false);
  for (std::size_t step = 0; step < r; ++step) {
    double best = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i]) best = std::max(best, diag[i]);
    if (best <= 0) break;
    std::size_t p = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i] && diag[i] >= 0.1 * best) {
        p = i;
        break;
      }
    used[p] = true;
    picked.push_back(cand[p]);
    double piv = std::sqrt(diag[p]);
    CVector col(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i] && i != p) continue;
      Complex s = h(cand[i], cand[p]);
      for (const auto& c : l) s -= c[i] * std::conj(c[p]);
      col[i] = s / piv;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i]) diag[i] -= std::norm(col[i]);
    l.push_back(col);
  }
  return picked;
}

std::vector<std::vector<std::size_t>> cluster_values(const std::vector<double>& ev, double gap) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (i == 0 || ev[i] - ev[i - 1] >= gap)
      groups.push_back({i});
    else
      groups.back().push_back(i);
  }
  return groups;
}

}  // namespace

ExtractionResult extract(const MomentSequence& seq, int m, const ExtractOptions& opts) {
  FlatnessReport fr = is_flat(seq, m, opts.rank_tol);
  if (!fr.positive) throw Error(Errc::kNotPositive, "H_{m+1} is not positive semidefinite");
  if (!fr.flat) {
    std::ostringstream os;
    os << "not flat: rank H_m = " << fr.rank_m << ", rank H_{m+1} = " << fr.rank_m1;
    throw Error(Errc::kNotFlat, os.str());
  }
  ExtractionResult res;
  res.diagnostics.rank_m = fr.rank_m;
  res.diagnostics.rank_m1 = fr.rank_m1;
  std::size_t r = fr.rank_m;
  std::size_t d = seq.d(), q = seq.q();
  if (r == 0) return res;

  BlockHankel hb = build_hankel(seq, m + 1);
  const CMatrix& h = hb.flat.matrix();
  const MultiIndexSet& idx = hb.index;

  std::vector<std::size_t> low_blocks;
  for (std::size_t k = 0; k < idx.size(); ++k)
    if (degree(idx[k]) <= m) low_blocks.push_back(k);
  std::vector<std::size_t> graded = low_blocks;
  std::stable_sort(graded.begin(), graded.end(),
                   [&](std::size_t a, std::size_t b) { return degree(idx[a]) < degree(idx[b]); });
  std::vector<std::size_t> cand;
  for (std::size_t k : graded)
    for (std::size_t a = 0; a < q; ++a) cand.push_back(k * q + a);
  std::vector<std::size_t> picked = select_columns(h, cand, r);
  if (picked.size() < r) throw Error(Errc::kNotFlat, "could not select rank-many independent columns");

  CMatrix g = h.rows_subset(picked).columns(picked);
  HermMat gis = spectral_map(HermMat::hermitian_part(g), [](double x) { return x > 0 ? 1.0 / std::sqrt(x) : 0.0; });
  CMatrix v = h.columns(picked) * gis.matrix();

  std::vector<std::size_t> rows_low;
  for (std::size_t k : low_blocks)
    for (std::size_t a = 0; a < q; ++a) rows_low.push_back(k * q + a);
  CMatrix v_low = v.rows_subset(rows_low);

  std::vector<HermMat> shifts;
  double scale = 0;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<std::size_t> rows_shift;
    MultiIndex e(d, 0);
    e[i] = 1;
    for (std::size_t k : low_blocks) {
      std::size_t ks = idx.position(add(idx[k], e));
      for (std::size_t a = 0; a < q; ++a) rows_shift.push_back(ks * q + a);
    }
    CMatrix t = lstsq(v_low, v.rows_subset(rows_shift));
    double tn = t.frobenius_norm();
    double defect = (t - t.adjoint()).frobenius_norm() / std::max(tn, 1e-300);
    res.diagnostics.hermiticity_defect = std::max(res.diagnostics.hermiticity_defect, defect);
    shifts.push_back(HermMat::hermitian_part(t));
    scale = std::max(scale, tn);
  }
  double scale2 = std::max(scale * scale, 1e-300);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      double c = commutator_norm(shifts[i].matrix(), shifts[j].matrix());
      res.diagnostics.commutator_norms.push_back(c);
      if (c > opts.commute_tol * scale2) {
        std::ostringstream os;
        os << "shift matrices X_" << i << " and X_" << j << " do not commute (norm " << c << ")";
        throw Error(Errc::kNonCommutingShifts, os.str());
      }
    }

  // Joint eigenvectors.
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> nd;
  CMatrix qmat;
  bool ok = false;
  for (int attempt = 0; attempt < 5 && !ok; ++attempt) {
    res.diagnostics.retries = attempt;
    HermMat comb(r);
    for (std::size_t i = 0; i < d; ++i) comb += nd(rng) * shifts[i];
    EigenDecomp e = eig_herm(comb);
    double spread = e.values.back() - e.values.front();
    auto groups = cluster_values(e.values, 1e-7 * spread);
    ok = true;
    for (const auto& gr : groups) {
      if (gr.size() == 1) continue;
      CMatrix p = e.vectors.columns(gr);
      for (std::size_t i = 0; i < d && ok; ++i) {
        CMatrix sub = p.adjoint() * shifts[i].matrix() * p;
        double mean = 0;
        for (std::size_t a = 0; a < gr.size(); ++a) mean += sub(a, a).real();
        mean /= static_cast<double>(gr.size());
        for (std::size_t a = 0; a < gr.size(); ++a) sub(a, a) -= mean;
        if (sub.frobenius_norm() > 1e-6 * std::max(scale, 1e-300)) ok = false;
      }
    }
    if (ok) qmat = e.vectors;
  }
  if (!ok) {
    try {
      qmat = simultaneous_diagonalize(shifts, opts.commute_tol).unitary;
      res.diagnostics.used_cluster_fallback = true;
    } catch (const Error& err) {
      throw Error(Errc::kDegenerateEigenvalues, std::string("joint diagonalization failed: ") + err.what());
    }
  }

  // Points from Rayleigh quotients, regrouped when coincident.
  std::vector<std::vector<double>> raw(r, std::vector<double>(d));
  for (std::size_t p = 0; p < r; ++p) {
    CVector w = qmat.column(p);
    for (std::size_t i = 0; i < d; ++i) {
      CVector tw = shifts[i].matrix() * w;
      Complex s = 0;
      for (std::size_t a = 0; a < r; ++a) s += std::conj(w[a]) * tw[a];
      raw[p][i] = s.real();
    }
  }
  double spread = 0;
  for (std::size_t i = 0; i < d; ++i) {
    double lo = raw[0][i], hi = raw[0][i];
    for (const auto& x : raw) {
      lo = std::min(lo, x[i]);
      hi = std::max(hi, x[i]);
    }
    spread = std::max(spread, hi - lo);
  }
  double merge = 1e-6 * (1.0 + spread);
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t p = 0; p < r; ++p) {
    bool placed = false;
    for (auto& gr : groups) {
      double dist = 0;
      for (std::size_t i = 0; i < d; ++i) dist = std::max(dist, std::abs(raw[gr[0]][i] - raw[p][i]));
      if (dist <= merge) {
        gr.push_back(p);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({p});
  }
  std::size_t n = groups.size();
  for (const auto& gr : groups) {
    std::vector<double> x(d, 0.0);
    for (std::size_t p : gr)
      for (std::size_t i = 0; i < d; ++i) x[i] += raw[p][i];
    for (auto& c : x) c /= static_cast<double>(gr.size());
    res.points.push_back(x);
  }

  // Rank-one masses from rows (0, a) of V Q; the zero multi-index is first in lex order.
  CMatrix w = v * qmat;
  for (const auto& gr : groups) {
    HermMat mass(q);
    for (std::size_t p : gr) {
      CVector u(q);
      for (std::size_t a = 0; a < q; ++a) u[a] = w(a, p);
      mass += HermMat::outer(u);
    }
    res.diagnostics.rank_one_masses.push_back(mass);
  }

  // Least-squares masses over all moments.
  const MultiIndexSet& all = seq.index();
  CMatrix vand(all.size(), n);
  CMatrix rhs(all.size(), q * q);
  for (std::size_t a = 0; a < all.size(); ++a) {
    for (std::size_t p = 0; p < n; ++p) vand(a, p) = monomial(res.points[p], all[a]);
    const HermMat& s = seq.moments()[a];
    for (std::size_t b = 0; b < q * q; ++b) rhs(a, b) = s(b / q, b % q);
  }
  CMatrix sol = lstsq(vand, rhs);
  for (std::size_t p = 0; p < n; ++p) {
    CMatrix mp(q, q);
    for (std::size_t b = 0; b < q * q; ++b) mp(b / q, b % q) = sol(p, b);
    res.masses.push_back(psd_project(HermMat::hermitian_part(mp)));
  }

  double num = 0, den = 0;
  for (std::size_t a = 0; a < all.size(); ++a) {
    HermMat s(q);
    for (std::size_t p = 0; p < n; ++p) s += monomial(res.points[p], all[a]) * res.masses[p];
    num = std::max(num, (s - seq.moments()[a]).frobenius_norm());
    den = std::max(den, seq.moments()[a].frobenius_norm());
  }
  res.residual = den > 0 ? num / den : num;
  if (res.residual > opts.residual_tol) {
    std::ostringstream os;
    os << "extracted measure reproduces moments only to " << res.residual;
    throw Error(Errc::kResidualTooLarge, os.str());
  }
  return res;
}

}  // namespace matmoment
