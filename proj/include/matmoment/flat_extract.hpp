#pragma once

#include <cstdint>
#include <vector>

#include "matmoment/functional.hpp"
#include "matmoment/hankel.hpp"

namespace matmoment {

struct ExtractOptions {
  double rank_tol = 1e-8;
  double commute_tol = 1e-6;   // relative to max ||X_i||_F^2
  double residual_tol = 1e-6;  // relative moment mismatch
  std::uint64_t seed = 20240611;
};

struct ExtractionDiagnostics {
  std::size_t rank_m = 0;
  std::size_t rank_m1 = 0;
  std::vector<double> commutator_norms;
  double hermiticity_defect = 0;
  int retries = 0;
  bool used_cluster_fallback = false;
  // Masses from the eigenvector rows (rank-one regrouping), for cross-checks.
  std::vector<HermMat> rank_one_masses;
};

struct ExtractionResult {
  std::vector<std::vector<double>> points;
  std::vector<HermMat> masses;
  double residual = 0;
  ExtractionDiagnostics diagnostics;
  AtomicMeasure measure() const;
};

ExtractionResult extract(const MomentSequence& seq, int m, const ExtractOptions& opts = {});

// S_alpha = sum_j x_j^alpha M_j for |alpha| <= n. Atoms need coordinates.
MomentSequence moments_from_measure(const AtomicMeasure& nu, int n);
MomentSequence moments_from_measure(const AtomicMeasure& nu, int n, std::size_t d, std::size_t q);

}  // namespace matmoment
