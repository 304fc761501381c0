#include "matmoment/fixtures.hpp"

#include "matmoment/flat_extract.hpp"

namespace matmoment::fixtures {

io::Problem e1012() {
  ScalarSpaceE e(FiniteSpace({{"x0", {0.0}}}), {{1.0}}, true);
  AtomicMeasure nu;
  nu.atoms.push_back({"x0", HermMat::identity(1), {0.0}});
  NoLargestFixture f = build_nolargest_fixture(e, nu, {0.0}, "x0");
  return io::Problem{f.space, f.lambda, {}, {}};
}

AtomicMeasure e1802_measure(const HermMat& mass) {
  AtomicMeasure mu;
  const std::vector<std::vector<double>> coords{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  for (std::size_t j = 0; j < coords.size(); ++j) mu.atoms.push_back({"x" + std::to_string(j), mass, coords[j]});
  return mu;
}

io::Problem e1802(const HermMat& mass) {
  AtomicMeasure mu = e1802_measure(mass);
  std::vector<Point> pts;
  for (const auto& a : mu.atoms) pts.push_back({a.label, a.coords});
  // 1, x, x^2, y, y^2 restricted to the four points; x^2 = x and y^2 = y there.
  std::vector<std::vector<double>> tables(5);
  for (const auto& p : pts) {
    double x = p.coords[0], y = p.coords[1];
    tables[0].push_back(1);
    tables[1].push_back(x);
    tables[2].push_back(x * x);
    tables[3].push_back(y);
    tables[4].push_back(y * y);
  }
  std::vector<std::vector<double>> basis;
  for (std::size_t i : independent_subset(tables)) basis.push_back(tables[i]);
  ScalarSpaceE e(FiniteSpace(pts), basis, true);
  auto space = std::make_shared<const MatrixFunctionSpace>(lift_scalar_space(e, mass.dim()));
  return io::Problem{space, functional_from_measure(space, mu), {}, {}};
}

NoLargestInput nolargest_default() {
  std::vector<Point> pts{{"x0", {0.0}}, {"x1", {1.0}}};
  ScalarSpaceE e(FiniteSpace(pts), {{1.0, 1.0}, {0.0, 1.0}}, true);
  AtomicMeasure nu;
  nu.atoms.push_back({"x0", HermMat::identity(1), {0.0}});
  nu.atoms.push_back({"x1", HermMat::identity(1), {1.0}});
  return NoLargestInput{e, nu, {0.5, 0.3}, "x0"};
}

io::Problem nolargest(const NoLargestInput& in) {
  NoLargestFixture f = build_nolargest_fixture(in.e, in.nu, in.couplings, in.point);
  return io::Problem{f.space, f.lambda, {}, {}};
}

MomentSequence hankel_delta(const std::vector<double>& point, const HermMat& mass, int n) {
  AtomicMeasure nu;
  nu.atoms.push_back({"p", mass, point});
  return moments_from_measure(nu, n, point.size(), mass.dim());
}

}  // namespace matmoment::fixtures
