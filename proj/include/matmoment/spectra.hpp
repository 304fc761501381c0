#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "matmoment/functional.hpp"

namespace matmoment {

// trace_inner(M_point, direction) >= bound.
struct Halfspace {
  std::string point;
  HermMat direction;
  double bound = 0;
};

struct Pin {
  std::string point;
  HermMat mass;
};

enum class FeasibilityStatus { kFeasible, kInfeasible, kInconclusive };
enum class Engine { kDykstra, kBarrier };

const char* status_name(FeasibilityStatus s);
const char* engine_name(Engine e);

struct FeasibilityOptions {
  double tol = 1e-7;
  int max_iter = 20000;
  Engine engine = Engine::kDykstra;
  // Mass-units scale for relative tolerances; 0 picks the least-norm solution size.
  double scale = 0;
};

struct FeasibilityReport {
  FeasibilityStatus status = FeasibilityStatus::kInconclusive;
  std::optional<AtomicMeasure> witness;
  double distance = 0;    // final distance to the constraint sets (mass units)
  int iterations = 0;
  double confidence = 0;  // 1 for certified outcomes
  double margin = 0;      // barrier engine: best achievable min eigenvalue (mass units)
  int monotonicity_faults = 0;
  Engine engine = Engine::kDykstra;
  std::string note;
  bool feasible() const { return status == FeasibilityStatus::kFeasible; }
};

class Spectrahedron {
 public:
  Spectrahedron(std::shared_ptr<const MatrixFunctionSpace> space, MomentFunctional target,
                std::vector<Halfspace> halfspaces = {}, std::vector<Pin> pins = {});

  // Same space and pinned point set; the cached affine structure is shared.
  Spectrahedron rebind(MomentFunctional target, std::vector<Halfspace> halfspaces, std::vector<Pin> pins) const;

  const MatrixFunctionSpace& space() const { return *space_; }
  std::shared_ptr<const MatrixFunctionSpace> space_ptr() const { return space_; }
  const MomentFunctional& target() const { return target_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  const std::vector<Pin>& pins() const { return pins_; }

  struct Cache;
  const Cache& cache() const { return *cache_; }

 private:
  Spectrahedron(std::shared_ptr<const MatrixFunctionSpace> space, MomentFunctional target,
                std::vector<Halfspace> halfspaces, std::vector<Pin> pins, std::shared_ptr<const Cache> cache);
  std::shared_ptr<const MatrixFunctionSpace> space_;
  MomentFunctional target_;
  std::vector<Halfspace> halfspaces_;
  std::vector<Pin> pins_;
  std::shared_ptr<const Cache> cache_;
};

FeasibilityReport feasible(const Spectrahedron& s, const FeasibilityOptions& opts = {});

// Requires a unit element (MissingUnit otherwise).
FeasibilityReport is_moment_functional(const MomentFunctional& lambda, const FeasibilityOptions& opts = {});

// Coefficients of a pointwise-PSD F with Lambda(F) < -tol * ||Lambda|| * ||F||, if one is found.
std::optional<std::vector<double>> positivity_violation_search(const MomentFunctional& lambda, int trials,
                                                               std::uint64_t seed = 1, double tol = 1e-9);

// Max over constraints of the witness violation: |Lambda^nu - Lambda| (relative), pins, halfspaces.
double witness_error(const Spectrahedron& s, const AtomicMeasure& nu);

}  // namespace matmoment
