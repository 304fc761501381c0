#pragma once

#include <cstddef>
#include <vector>

#include "matmoment/hermitian.hpp"
#include "matmoment/linalg.hpp"

// Data-parallel inner loops. Every kernel has a serial reference and an OpenMP
// version with identical results; the unqualified entry points dispatch on size.
namespace matmoment::kernels {

struct MomentJob {
  std::size_t d = 0;
  std::vector<std::vector<double>> coords;         // per atom
  std::vector<HermMat> masses;                     // per atom
  std::vector<std::vector<int>> alphas;            // multi-indices to evaluate
};

namespace serial {
// y holds `blocks` consecutive q^2-vectors of H_jk coordinates; each is replaced by
// the coordinates of its PSD projection.
void psd_project_blocks(double* y, std::size_t blocks, std::size_t q);
// out = P x + offset.
void affine_map(const RMatrix& p, const double* x, const double* offset, double* out);
std::vector<HermMat> accumulate_moments(const MomentJob& job, std::size_t q);
// Flattened block Hankel matrix; index(k, l) gives the moment slot of block (k, l).
CMatrix flatten_blocks(const std::vector<HermMat>& moments, const std::vector<std::size_t>& index,
                       std::size_t nblocks, std::size_t q);
}  // namespace serial

namespace parallel {
void psd_project_blocks(double* y, std::size_t blocks, std::size_t q);
void affine_map(const RMatrix& p, const double* x, const double* offset, double* out);
std::vector<HermMat> accumulate_moments(const MomentJob& job, std::size_t q);
CMatrix flatten_blocks(const std::vector<HermMat>& moments, const std::vector<std::size_t>& index,
                       std::size_t nblocks, std::size_t q);
}  // namespace parallel

void psd_project_blocks(double* y, std::size_t blocks, std::size_t q);
void affine_map(const RMatrix& p, const double* x, const double* offset, double* out);
std::vector<HermMat> accumulate_moments(const MomentJob& job, std::size_t q);
CMatrix flatten_blocks(const std::vector<HermMat>& moments, const std::vector<std::size_t>& index,
                       std::size_t nblocks, std::size_t q);

int max_threads();

}  // namespace matmoment::kernels
