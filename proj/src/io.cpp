#include "matmoment/io.hpp"

#include <fstream>
#include <sstream>

#include "matmoment/error.hpp"

namespace matmoment::io {

namespace {

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(Errc::kInvalidInput, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

template <typename F>
auto guarded(F f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(Errc::kInvalidInput, std::string("bad JSON shape: ") + e.what());
  }
}

Json doubles(const std::vector<double>& v) { return Json(v); }

std::vector<double> doubles_from(const Json& j) { return j.get<std::vector<double>>(); }

}  // namespace

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::kIo, std::string("malformed JSON: ") + e.what());
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  return read_stream(in);
}

Json read_stream(std::istream& in) {
  std::stringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::kIo, "read failure");
  return parse(ss.str());
}

Json to_json(const CMatrix& a) {
  Json re = Json::array(), im = Json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::vector<double> r, c;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      r.push_back(a(i, k).real());
      c.push_back(a(i, k).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return Json{{"rows", a.rows()}, {"cols", a.cols()}, {"re", re}, {"im", im}};
}

CMatrix cmatrix_from_json(const Json& j) {
  return guarded([&] {
    const Json& re = need(j, "re");
    std::size_t rows = re.size();
    std::size_t cols = rows ? re.at(0).size() : 0;
    if (j.contains("rows")) rows = j.at("rows").get<std::size_t>();
    if (j.contains("cols")) cols = j.at("cols").get<std::size_t>();
    CMatrix a(rows, cols);
    const Json* im = j.contains("im") ? &j.at("im") : nullptr;
    if (re.size() != rows || (im && im->size() != rows)) throw Error(Errc::kInvalidInput, "matrix row count mismatch");
    for (std::size_t i = 0; i < rows; ++i) {
      if (re.at(i).size() != cols || (im && im->at(i).size() != cols))
        throw Error(Errc::kInvalidInput, "matrix column count mismatch");
      for (std::size_t k = 0; k < cols; ++k)
        a(i, k) = Complex(re.at(i).at(k).get<double>(), im ? im->at(i).at(k).get<double>() : 0.0);
    }
    return a;
  });
}

Json to_json(const HermMat& a) {
  Json c = to_json(a.matrix());
  return Json{{"q", a.dim()}, {"re", c["re"]}, {"im", c["im"]}};
}

HermMat herm_from_json(const Json& j) {
  return guarded([&] {
    CMatrix a = cmatrix_from_json(j);
    if (a.rows() != a.cols()) throw Error(Errc::kInvalidInput, "Hermitian matrix must be square");
    if (j.contains("q") && j.at("q").get<std::size_t>() != a.rows())
      throw Error(Errc::kInvalidInput, "matrix size disagrees with q");
    return HermMat::from_matrix(a);
  });
}

Json to_json(const FiniteSpace& s) {
  Json pts = Json::array();
  for (const auto& p : s.points()) pts.push_back(Json{{"label", p.label}, {"coords", doubles(p.coords)}});
  return pts;
}

FiniteSpace finite_space_from_json(const Json& j) {
  return guarded([&] {
    std::vector<Point> pts;
    for (const auto& p : j) {
      Point pt;
      pt.label = need(p, "label").get<std::string>();
      if (p.contains("coords")) pt.coords = doubles_from(p.at("coords"));
      pts.push_back(std::move(pt));
    }
    return FiniteSpace(std::move(pts));
  });
}

Json to_json(const ScalarSpaceE& e) {
  Json basis = Json::array();
  for (const auto& g : e.basis()) basis.push_back(doubles(g));
  return Json{{"points", to_json(e.space())}, {"basis", basis}, {"contains_one", e.contains_one()}};
}

ScalarSpaceE scalar_space_from_json(const Json& j) {
  return guarded([&] {
    FiniteSpace s = finite_space_from_json(need(j, "points"));
    std::vector<std::vector<double>> basis;
    for (const auto& g : need(j, "basis")) basis.push_back(doubles_from(g));
    bool one = j.contains("contains_one") && j.at("contains_one").get<bool>();
    return ScalarSpaceE(std::move(s), std::move(basis), one);
  });
}

Json to_json(const MatrixFunctionSpace& s) {
  Json basis = Json::array();
  for (const auto& table : s.basis()) {
    Json t = Json::array();
    for (const auto& h : table) t.push_back(to_json(h));
    basis.push_back(t);
  }
  Json out{{"q", s.q()}, {"points", to_json(s.space())}, {"basis", basis}};
  if (s.unit()) out["unit"] = Json{{"coeffs", doubles(s.unit()->coeffs)}, {"epsilon", s.unit()->epsilon}};
  if (s.lift_source()) out["lift"] = to_json(*s.lift_source());
  return out;
}

MatrixFunctionSpace space_from_json(const Json& j) {
  return guarded([&] {
    std::size_t q = need(j, "q").get<std::size_t>();
    if (j.contains("lift")) return lift_scalar_space(scalar_space_from_json(j.at("lift")), q);
    FiniteSpace pts = finite_space_from_json(need(j, "points"));
    std::vector<std::vector<HermMat>> basis;
    for (const auto& t : need(j, "basis")) {
      std::vector<HermMat> table;
      for (const auto& h : t) table.push_back(herm_from_json(h));
      basis.push_back(std::move(table));
    }
    std::optional<UnitElement> unit;
    if (j.contains("unit"))
      unit = UnitElement{doubles_from(need(j.at("unit"), "coeffs")), need(j.at("unit"), "epsilon").get<double>()};
    return MatrixFunctionSpace(std::move(pts), q, std::move(basis), unit);
  });
}

Json to_json(const MomentFunctional& f) { return Json{{"values", doubles(f.values)}}; }

MomentFunctional functional_from_json(const Json& j, std::shared_ptr<const MatrixFunctionSpace> space) {
  return guarded([&] {
    std::vector<double> v = doubles_from(need(j, "values"));
    if (space && v.size() != space->dim()) throw Error(Errc::kDimensionMismatch, "functional does not match the space");
    return MomentFunctional(std::move(space), std::move(v));
  });
}

Json to_json(const AtomicMeasure& nu) {
  Json atoms = Json::array();
  for (const auto& a : nu.atoms) {
    Json at{{"point", a.label}, {"mass", to_json(a.mass)}};
    if (!a.coords.empty()) at["coords"] = doubles(a.coords);
    atoms.push_back(at);
  }
  return Json{{"atoms", atoms}};
}

AtomicMeasure measure_from_json(const Json& j) {
  return guarded([&] {
    AtomicMeasure nu;
    for (const auto& a : need(j, "atoms")) {
      Atom at;
      at.label = need(a, "point").get<std::string>();
      at.mass = herm_from_json(need(a, "mass"));
      if (a.contains("coords")) at.coords = doubles_from(a.at("coords"));
      nu.atoms.push_back(std::move(at));
    }
    return nu;
  });
}

Json to_json(const Problem& p) {
  Json out{{"space", to_json(*p.space)}, {"functional", to_json(p.functional)}};
  Json pins = Json::array(), hs = Json::array();
  for (const auto& pin : p.pins) pins.push_back(Json{{"point", pin.point}, {"mass", to_json(pin.mass)}});
  for (const auto& h : p.halfspaces)
    hs.push_back(Json{{"point", h.point}, {"direction", to_json(h.direction)}, {"bound", h.bound}});
  out["pins"] = pins;
  out["halfspaces"] = hs;
  return out;
}

Problem problem_from_json(const Json& j) {
  return guarded([&] {
    Problem p;
    p.space = std::make_shared<const MatrixFunctionSpace>(space_from_json(need(j, "space")));
    p.functional = functional_from_json(need(j, "functional"), p.space);
    if (j.contains("pins"))
      for (const auto& pin : j.at("pins"))
        p.pins.push_back(Pin{need(pin, "point").get<std::string>(), herm_from_json(need(pin, "mass"))});
    if (j.contains("halfspaces"))
      for (const auto& h : j.at("halfspaces"))
        p.halfspaces.push_back(Halfspace{need(h, "point").get<std::string>(), herm_from_json(need(h, "direction")),
                                         need(h, "bound").get<double>()});
    return p;
  });
}

Json to_json(const MomentSequence& s) {
  Json moments = Json::array();
  for (std::size_t i = 0; i < s.index().size(); ++i)
    moments.push_back(Json{{"alpha", s.index()[i]}, {"S", to_json(s.moments()[i])}});
  return Json{{"d", s.d()}, {"q", s.q()}, {"N", s.degree()}, {"ordering", "lex"}, {"moments", moments}};
}

MomentSequence sequence_from_json(const Json& j) {
  return guarded([&] {
    if (j.contains("ordering") && j.at("ordering").get<std::string>() != "lex")
      throw Error(Errc::kInvalidInput, "only lex ordering is supported");
    MomentSequence s(need(j, "d").get<std::size_t>(), need(j, "q").get<std::size_t>(), need(j, "N").get<int>());
    std::vector<bool> seen(s.index().size(), false);
    for (const auto& m : need(j, "moments")) {
      MultiIndex a = need(m, "alpha").get<MultiIndex>();
      s.set(a, herm_from_json(need(m, "S")));
      seen[s.index().position(a)] = true;
    }
    for (bool b : seen)
      if (!b) throw Error(Errc::kInvalidInput, "moment sequence is incomplete");
    return s;
  });
}

Json to_json(const MatrixMomentFunctional& l) {
  Json values = Json::array();
  for (const auto& v : l.values) values.push_back(to_json(v));
  return Json{{"scalar_space", to_json(l.domain)}, {"values", values}};
}

MatrixMomentFunctional matrix_functional_from_json(const Json& j) {
  return guarded([&] {
    MatrixMomentFunctional l;
    l.domain = scalar_space_from_json(need(j, "scalar_space"));
    for (const auto& v : need(j, "values")) l.values.push_back(herm_from_json(v));
    if (l.values.size() != l.domain.dim()) throw Error(Errc::kDimensionMismatch, "one value per basis function");
    for (const auto& v : l.values)
      if (v.dim() != l.q()) throw Error(Errc::kDimensionMismatch, "values have different sizes");
    return l;
  });
}

Json to_json(const PositiveMap& phi) {
  Json k = Json::array();
  for (const auto& v : phi.kraus) {
    Json c = to_json(v);
    k.push_back(Json{{"re", c["re"]}, {"im", c["im"]}});
  }
  return Json{{"q", phi.q}, {"p", phi.p}, {"transpose_first", phi.transpose_first}, {"kraus", k}};
}

PositiveMap map_from_json(const Json& j) {
  return guarded([&] {
    PositiveMap phi;
    phi.q = need(j, "q").get<std::size_t>();
    phi.p = need(j, "p").get<std::size_t>();
    phi.transpose_first = j.contains("transpose_first") && j.at("transpose_first").get<bool>();
    for (const auto& v : need(j, "kraus")) {
      Json shaped = v;
      shaped["rows"] = phi.q;
      shaped["cols"] = phi.p;
      phi.kraus.push_back(cmatrix_from_json(shaped));
    }
    phi.validate();
    return phi;
  });
}

Json to_json(const MatHomPoly& p) {
  Json coeffs = Json::array();
  for (std::size_t i = 0; i < p.index.size(); ++i)
    coeffs.push_back(Json{{"alpha", p.index[i]}, {"A", to_json(p.coeffs[i])}});
  return Json{{"d", p.d}, {"m", p.m}, {"q", p.q}, {"coeffs", coeffs}};
}

MatHomPoly poly_from_json(const Json& j) {
  return guarded([&] {
    MatHomPoly p(need(j, "d").get<std::size_t>(), need(j, "m").get<int>(), need(j, "q").get<std::size_t>());
    for (const auto& c : need(j, "coeffs")) {
      HermMat a = herm_from_json(need(c, "A"));
      if (a.dim() != p.q) throw Error(Errc::kDimensionMismatch, "coefficient has wrong size");
      p.at(need(c, "alpha").get<MultiIndex>()) = a;
    }
    return p;
  });
}

Json to_json(const ConeElement& f) {
  Json terms = Json::array();
  for (const auto& t : f.terms) terms.push_back(Json{{"eta", doubles(t.eta)}, {"C", to_json(t.c)}});
  return Json{{"d", f.d}, {"m", f.m}, {"q", f.q}, {"terms", terms}};
}

ConeElement cone_from_json(const Json& j) {
  return guarded([&] {
    ConeElement f{need(j, "d").get<std::size_t>(), need(j, "m").get<int>(), need(j, "q").get<std::size_t>(), {}};
    for (const auto& t : need(j, "terms")) f.terms.push_back({doubles_from(need(t, "eta")), herm_from_json(need(t, "C"))});
    f.validate();
    return f;
  });
}

Json to_json(const PolyFunctional& f) {
  return Json{{"d", f.d}, {"m", f.m}, {"q", f.q}, {"basis", "monomial_hjk"}, {"values", doubles(f.values)}};
}

PolyFunctional poly_functional_from_json(const Json& j) {
  return guarded([&] {
    PolyFunctional f{need(j, "d").get<std::size_t>(), need(j, "m").get<int>(), need(j, "q").get<std::size_t>(),
                     doubles_from(need(j, "values"))};
    if (f.values.size() != homogeneous_indices(f.d, f.m).size() * f.q * f.q)
      throw Error(Errc::kDimensionMismatch, "functional value count does not match (d, m, q)");
    return f;
  });
}

Json to_json(const FeasibilityReport& r) {
  Json out{{"status", status_name(r.status)}, {"engine", engine_name(r.engine)}, {"distance", r.distance},
           {"iterations", r.iterations}, {"confidence", r.confidence}, {"margin", r.margin},
           {"monotonicity_faults", r.monotonicity_faults}};
  if (!r.note.empty()) out["note"] = r.note;
  if (r.witness) out["witness"] = to_json(*r.witness);
  return out;
}

Json to_json(const ExtractionResult& r) {
  Json d{{"rank_m", r.diagnostics.rank_m}, {"rank_m1", r.diagnostics.rank_m1},
         {"commutator_norms", r.diagnostics.commutator_norms}, {"hermiticity_defect", r.diagnostics.hermiticity_defect},
         {"retries", r.diagnostics.retries}, {"used_cluster_fallback", r.diagnostics.used_cluster_fallback}};
  Json out = to_json(r.measure());
  out["residual"] = r.residual;
  out["diagnostics"] = d;
  return out;
}

}  // namespace matmoment::io
