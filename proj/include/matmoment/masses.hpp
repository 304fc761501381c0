#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matmoment/functional.hpp"
#include "matmoment/spectra.hpp"

namespace matmoment {

struct MassOptions {
  double tol = 1e-9;          // feasibility tolerance (relative to the mass scale)
  Engine engine = Engine::kBarrier;
  double bisect_tol = 1e-10;  // relative width of bisection brackets
  double step_tol = 1e-6;     // maximality: smallest step that counts as an improvement
  int probes = 64;            // random rank-one directions per round
  std::uint64_t seed = 7;
  double scale = 0;           // mass scale; 0 derives it from the functional
  double residual_tol = 1e-7; // ordered construction stops at ||Lambda_k|| <= residual_tol ||Lambda||
};

struct MassQuery {
  MomentFunctional lambda;
  std::string point;
  HermMat candidate;
};

FeasibilityOptions feasibility_options(const MassOptions& opts);

// Size of the least-norm mass vector reproducing Lambda; 1 when Lambda = 0.
double mass_scale(const MomentFunctional& lambda);

// Lambda - tr(F(x0) M).
MomentFunctional subtract_mass(const MomentFunctional& lambda, const std::string& point, const HermMat& m);

FeasibilityReport mass_membership(const MassQuery& q, const MassOptions& opts = {});
FeasibilityReport penumbra_membership(const MassQuery& q, const MassOptions& opts = {});

double scaling_I(const MomentFunctional& lambda, const std::string& point, const HermMat& m,
                 const MassOptions& opts = {});

// Largest trace of a mass at the point over all representing measures, with a mass attaining it.
struct SupTrace {
  double value = 0;
  HermMat mass;
};
SupTrace sup_trace(const MomentFunctional& lambda, const std::string& point, const MassOptions& opts = {});

struct ProbeCertificate {
  HermMat direction;  // unit Frobenius norm, PSD
  double max_step = 0;
};

struct MaximalMassResult {
  HermMat mass;
  std::vector<ProbeCertificate> certificates;
  int rounds = 0;
};

MaximalMassResult maximal_mass(const MomentFunctional& lambda, const std::string& point,
                               const std::optional<HermMat>& seed = std::nullopt, const MassOptions& opts = {});

struct CoreEntry {
  std::string point;
  double sup_trace = 0;
  bool in_core = false;
  HermMat mass;  // a mass attaining the sup-trace
};
std::vector<CoreEntry> core_set(const MomentFunctional& lambda, const MassOptions& opts = {});

struct OrderedMaxMassResult {
  std::vector<Atom> atoms;
  double residual_norm = 0;
  std::vector<std::vector<ProbeCertificate>> certificates;
  AtomicMeasure measure() const { return AtomicMeasure{atoms}; }
};

OrderedMaxMassResult ordered_maximal_measure(const MomentFunctional& lambda,
                                             const std::optional<std::string>& first = std::nullopt,
                                             const MassOptions& opts = {});

struct LargestMassResult {
  bool certified = false;
  std::vector<double> witness;  // scalar coefficients of f
  std::string note;
};

LargestMassResult largest_mass_check(const ScalarSpaceE& e, const AtomicMeasure& nu, const std::string& point,
                                     int trials = 200, std::uint64_t seed = 1, double tol = 1e-9);
// Unknown unless the space is a full lift of a scalar space.
LargestMassResult largest_mass_check(const MatrixFunctionSpace& space, const AtomicMeasure& nu,
                                     const std::string& point, int trials = 200, std::uint64_t seed = 1,
                                     double tol = 1e-9);

struct NoLargestFixture {
  std::shared_ptr<const MatrixFunctionSpace> space;
  MomentFunctional lambda;
  AtomicMeasure mu;
};

// nu: scalar (q = 1) measure on e.space(); couplings[j] pairs with nu.atoms[j].
NoLargestFixture build_nolargest_fixture(const ScalarSpaceE& e, const AtomicMeasure& nu,
                                         const std::vector<double>& couplings, const std::string& point);

// Fraction of convex combinations of two accepted masses that mass_membership accepts.
double convexity_probe(const MomentFunctional& lambda, const std::string& point, const HermMat& y1,
                       const HermMat& y2, int samples, const MassOptions& opts = {});

struct ClosednessProbe {
  std::vector<bool> sequence_accepted;
  bool limit_accepted = false;
};
// Penumbra membership along limit + (start - limit) / 2^k, k = 1..steps, and at the limit.
ClosednessProbe closedness_probe(const MomentFunctional& lambda, const std::string& point, const HermMat& start,
                                 const HermMat& limit, int steps, const MassOptions& opts = {});

}  // namespace matmoment
