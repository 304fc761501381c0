#include "matmoment/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace matmoment::kernels {

namespace {

void project_one(double* c, std::size_t q) {
  if (q == 1) {
    if (c[0] < 0) c[0] = 0;
    return;
  }
  HermMat a = from_hjk_coords(q, c);
  if (min_eigenvalue(a) >= 0) return;
  std::vector<double> out = hjk_coords(psd_project(a));
  for (std::size_t i = 0; i < q * q; ++i) c[i] = out[i];
}

double monomial(const std::vector<double>& x, const std::vector<int>& alpha) {
  double v = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    for (int e = 0; e < alpha[i]; ++e) v *= x[i];
  return v;
}

HermMat moment_at(const MomentJob& job, std::size_t a, std::size_t q) {
  HermMat s(q);
  for (std::size_t j = 0; j < job.masses.size(); ++j) {
    double w = monomial(job.coords[j], job.alphas[a]);
    if (w != 0.0) s += w * job.masses[j];
  }
  return s;
}

void fill_block_row(CMatrix& h, const std::vector<HermMat>& moments, const std::vector<std::size_t>& index,
                    std::size_t nblocks, std::size_t q, std::size_t k) {
  for (std::size_t l = 0; l < nblocks; ++l) {
    const HermMat& s = moments[index[k * nblocks + l]];
    for (std::size_t a = 0; a < q; ++a)
      for (std::size_t b = 0; b < q; ++b) h(k * q + a, l * q + b) = s(a, b);
  }
}

constexpr std::size_t kParallelBlocks = 64;
constexpr std::size_t kParallelRows = 256;

}  // namespace

namespace serial {

void psd_project_blocks(double* y, std::size_t blocks, std::size_t q) {
  for (std::size_t b = 0; b < blocks; ++b) project_one(y + b * q * q, q);
}

void affine_map(const RMatrix& p, const double* x, const double* offset, double* out) {
  for (std::size_t i = 0; i < p.rows; ++i) {
    double s = offset ? offset[i] : 0.0;
    const double* row = &p.data[i * p.cols];
    for (std::size_t j = 0; j < p.cols; ++j) s += row[j] * x[j];
    out[i] = s;
  }
}

std::vector<HermMat> accumulate_moments(const MomentJob& job, std::size_t q) {
  std::vector<HermMat> out(job.alphas.size());
  for (std::size_t a = 0; a < job.alphas.size(); ++a) out[a] = moment_at(job, a, q);
  return out;
}

CMatrix flatten_blocks(const std::vector<HermMat>& moments, const std::vector<std::size_t>& index,
                       std::size_t nblocks, std::size_t q) {
  CMatrix h(nblocks * q, nblocks * q);
  for (std::size_t k = 0; k < nblocks; ++k) fill_block_row(h, moments, index, nblocks, q, k);
  return h;
}

}  // namespace serial

namespace parallel {

void psd_project_blocks(double* y, std::size_t blocks, std::size_t q) {
  const long n = static_cast<long>(blocks);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < n; ++b) project_one(y + b * q * q, q);
}

void affine_map(const RMatrix& p, const double* x, const double* offset, double* out) {
  const long rows = static_cast<long>(p.rows);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < rows; ++i) {
    double s = offset ? offset[i] : 0.0;
    const double* row = &p.data[i * p.cols];
    for (std::size_t j = 0; j < p.cols; ++j) s += row[j] * x[j];
    out[i] = s;
  }
}

std::vector<HermMat> accumulate_moments(const MomentJob& job, std::size_t q) {
  std::vector<HermMat> out(job.alphas.size());
  const long n = static_cast<long>(job.alphas.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long a = 0; a < n; ++a) out[a] = moment_at(job, a, q);
  return out;
}

CMatrix flatten_blocks(const std::vector<HermMat>& moments, const std::vector<std::size_t>& index,
                       std::size_t nblocks, std::size_t q) {
  CMatrix h(nblocks * q, nblocks * q);
  const long n = static_cast<long>(nblocks);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) fill_block_row(h, moments, index, nblocks, q, k);
  return h;
}

}  // namespace parallel

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void psd_project_blocks(double* y, std::size_t blocks, std::size_t q) {
  if (blocks >= kParallelBlocks && max_threads() > 1)
    parallel::psd_project_blocks(y, blocks, q);
  else
    serial::psd_project_blocks(y, blocks, q);
}

void affine_map(const RMatrix& p, const double* x, const double* offset, double* out) {
  if (p.rows >= kParallelRows && max_threads() > 1)
    parallel::affine_map(p, x, offset, out);
  else
    serial::affine_map(p, x, offset, out);
}

std::vector<HermMat> accumulate_moments(const MomentJob& job, std::size_t q) {
  if (job.alphas.size() * job.masses.size() >= 4096 && max_threads() > 1) return parallel::accumulate_moments(job, q);
  return serial::accumulate_moments(job, q);
}

CMatrix flatten_blocks(const std::vector<HermMat>& moments, const std::vector<std::size_t>& index,
                       std::size_t nblocks, std::size_t q) {
  if (nblocks >= kParallelBlocks && max_threads() > 1) return parallel::flatten_blocks(moments, index, nblocks, q);
  return serial::flatten_blocks(moments, index, nblocks, q);
}

}  // namespace matmoment::kernels
