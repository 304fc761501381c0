#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "matmoment/apolar.hpp"
#include "matmoment/flat_extract.hpp"
#include "matmoment/functional.hpp"
#include "matmoment/hankel.hpp"
#include "matmoment/masses.hpp"
#include "matmoment/spectra.hpp"
#include "matmoment/transport.hpp"

namespace matmoment::io {

using Json = nlohmann::json;

// Space + functional (+ pins, halfspaces): the input of exists and the masses commands.
struct Problem {
  std::shared_ptr<const MatrixFunctionSpace> space;
  MomentFunctional functional;
  std::vector<Pin> pins;
  std::vector<Halfspace> halfspaces;
};

// Malformed JSON raises Io; well-formed JSON with the wrong shape raises InvalidInput.
Json parse(const std::string& text);
Json read_file(const std::string& path);
Json read_stream(std::istream& in);

Json to_json(const HermMat& a);
HermMat herm_from_json(const Json& j);

Json to_json(const FiniteSpace& s);
FiniteSpace finite_space_from_json(const Json& j);

Json to_json(const ScalarSpaceE& e);
ScalarSpaceE scalar_space_from_json(const Json& j);

Json to_json(const MatrixFunctionSpace& s);
MatrixFunctionSpace space_from_json(const Json& j);

Json to_json(const MomentFunctional& f);
MomentFunctional functional_from_json(const Json& j, std::shared_ptr<const MatrixFunctionSpace> space);

Json to_json(const AtomicMeasure& nu);
AtomicMeasure measure_from_json(const Json& j);

Json to_json(const Problem& p);
Problem problem_from_json(const Json& j);

Json to_json(const MomentSequence& s);
MomentSequence sequence_from_json(const Json& j);

Json to_json(const MatrixMomentFunctional& l);
MatrixMomentFunctional matrix_functional_from_json(const Json& j);

Json to_json(const PositiveMap& phi);
PositiveMap map_from_json(const Json& j);

Json to_json(const MatHomPoly& p);
MatHomPoly poly_from_json(const Json& j);

Json to_json(const ConeElement& f);
ConeElement cone_from_json(const Json& j);

Json to_json(const PolyFunctional& f);
PolyFunctional poly_functional_from_json(const Json& j);

Json to_json(const CMatrix& a);
CMatrix cmatrix_from_json(const Json& j);

Json to_json(const FeasibilityReport& r);
Json to_json(const ExtractionResult& r);

}  // namespace matmoment::io
