#include "json_io.hpp"

#include <fstream>
#include <sstream>

namespace loopgrad::io {

namespace {

template <typename F>
auto schema_guard(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaError, std::string(what) + ": " + e.what());
  }
}

}  // namespace

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) fail(ErrorKind::SchemaError, "complex numbers are [re, im] pairs");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json to_json(const CVector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

CVector vector_from_json(const json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    fail(ErrorKind::AlgebraMismatch, "coefficient array must have length " + std::to_string(dim));
  }
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = complex_from_json(j[static_cast<std::size_t>(i)]);
  return v;
}

json to_json(const CMatrix& m) {
  json data = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) data.push_back(to_json(m(i, j)));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

CMatrix matrix_from_json(const json& j) {
  return schema_guard("matrix", [&] {
    const int rows = j.at("rows").get<int>();
    const int cols = j.at("cols").get<int>();
    const json& data = j.at("data");
    if (rows < 1 || cols < 1 || static_cast<int>(data.size()) != rows * cols) {
      fail(ErrorKind::SchemaError, "matrix data must hold rows * cols entries");
    }
    CMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) m(r, c) = complex_from_json(data[static_cast<std::size_t>(r * cols + c)]);
    }
    return m;
  });
}

json algebra_to_json(const SimpleLieAlgebra& alg) {
  json constants = json::array();
  for (const auto& c : alg.structure_constants()) {
    constants.push_back(json::array({c.i, c.j, c.k, c.value.real(), c.value.imag()}));
  }
  return json{{"schema", kSchema},
              {"label", alg.label()},
              {"dim", alg.dim()},
              {"rank", alg.rank()},
              {"defining_dim", alg.defining_dim()},
              {"basis", alg.basis_labels()},
              {"bracket_constant", alg.bracket_constant()},
              {"constants", constants},
              {"jacobi_residual", alg.jacobi_residual()},
              {"realization_residual", alg.realization_residual()}};
}

AlgebraAutomorphism automorphism_from_json(const AlgebraPtr& alg, const json& j, double tol) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "identity")) return AlgebraAutomorphism::identity(alg);
  if (j.is_string() && j.get<std::string>() == "diagram") return diagram_automorphism(alg);
  if (j.is_string()) fail(ErrorKind::SchemaError, "unknown automorphism keyword '" + j.get<std::string>() + "'");
  if (j.is_object() && j.contains("group")) {
    const CMatrix g = matrix_from_json(j.at("group"));
    if (g.rows() != alg->defining_dim() || g.cols() != alg->defining_dim()) {
      fail(ErrorKind::InvalidGroupElement, "group element must be " + std::to_string(alg->defining_dim()) + " x " +
                                               std::to_string(alg->defining_dim()));
    }
    return inner_automorphism(alg, GroupElement(g));
  }
  return AlgebraAutomorphism(alg, matrix_from_json(j), tol);
}

json automorphism_to_json(const AlgebraAutomorphism& a) { return to_json(a.matrix()); }

TwistPtr twist_from_json(const json& doc, double tol) {
  return schema_guard("twist", [&] {
    const AlgebraPtr alg = build_algebra(doc.at("algebra").get<std::string>());
    const int K = doc.value("K", 1);
    const json aut = doc.contains("automorphism") ? doc.at("automorphism") : json("identity");
    return make_twist(automorphism_from_json(alg, aut, tol), K, tol);
  });
}

json modes_to_json(const LoopElement& xi) {
  json modes = json::array();
  for (const auto& [k, x] : xi.modes()) modes.push_back(json{{"k", k}, {"coeffs", to_json(x)}});
  return modes;
}

LoopElement modes_from_json(const TwistPtr& twist, const json& modes, double tol) {
  return schema_guard("modes", [&] {
    ModeMap m;
    const int d = twist->algebra()->dim();
    for (const auto& entry : modes) {
      const int k = entry.at("k").get<int>();
      CVector x = vector_from_json(entry.at("coeffs"), d);
      auto [it, inserted] = m.try_emplace(k, x);
      if (!inserted) it->second += x;
    }
    return LoopElement::make(twist, std::move(m), tol);
  });
}

json loop_element_to_json(const LoopElement& xi) {
  const auto& tw = *xi.twist();
  return json{{"schema", kSchema},
              {"algebra", tw.algebra()->label()},
              {"K", tw.K()},
              {"automorphism", automorphism_to_json(tw.automorphism())},
              {"modes", modes_to_json(xi)}};
}

LoopElement loop_element_from_json(const json& doc, double tol) {
  const TwistPtr tw = twist_from_json(doc, tol);
  return schema_guard("loop element", [&] { return modes_from_json(tw, doc.at("modes"), tol); });
}

json vector_field_to_json(const VectorFieldK& X) {
  json modes = json::array();
  for (const auto& [n, c] : X.harmonics()) modes.push_back(json{{"n", n}, {"re", c.real()}, {"im", c.imag()}});
  return json{{"K", X.K()}, {"modes", modes}};
}

VectorFieldK vector_field_from_json(const json& j, int K) {
  return schema_guard("vector field", [&] {
    if (j.is_number()) return VectorFieldK::constant(K, j.get<double>());
    if (j.contains("K") && j.at("K").get<int>() != K) {
      fail(ErrorKind::TwistMismatch, "vector field K differs from the loop algebra K");
    }
    std::map<int, Complex> h;
    for (const auto& m : j.at("modes")) h[m.at("n").get<int>()] += Complex(m.value("re", 0.0), m.value("im", 0.0));
    return VectorFieldK(K, std::move(h));
  });
}

json operator_to_json(const GradingOperator& Q) {
  json doc = loop_element_to_json(Q.eta());
  json out{{"schema", kSchema}, {"algebra", doc["algebra"]}, {"K", doc["K"]}, {"automorphism", doc["automorphism"]}};
  out["vector_field"] = vector_field_to_json(Q.X());
  out["eta"] = json{{"modes", doc["modes"]}};
  return out;
}

GradingOperator operator_from_json(const json& doc, double tol) {
  const TwistPtr tw = twist_from_json(doc, tol);
  return schema_guard("grading operator", [&] {
    const VectorFieldK X = vector_field_from_json(doc.at("vector_field"), tw->K());
    const LoopElement eta =
        doc.contains("eta") ? modes_from_json(tw, doc.at("eta").at("modes"), tol) : LoopElement::zero(tw);
    return GradingOperator(X, eta);
  });
}

json table_to_json(const GradationTable& table, double bracket_residual) {
  json entries = json::array();
  for (const auto& e : table.entries) {
    json basis = json::array();
    for (const auto& b : e.basis) basis.push_back(json{{"modes", modes_to_json(b)}});
    entries.push_back(json{{"degree", e.degree},
                           {"dim", e.basis.size()},
                           {"eigenvalue_deviation", e.eigenvalue_deviation},
                           {"residual", e.residual},
                           {"basis", basis}});
  }
  return json{{"schema", kSchema},
              {"status", "ok"},
              {"window", table.window},
              {"total_dim", table.total_dim()},
              {"entries", entries},
              {"residuals",
               {{"leakage", table.leakage},
                {"eigenvector", table.max_residual},
                {"eigenvalue_deviation", table.max_eigenvalue_deviation},
                {"bracket", bracket_residual}}}};
}

json normalization_to_json(const NormalizationResult& r) {
  const auto& rect = r.rectification;
  json lift = nullptr;
  if (auto e = rect.f.elementary()) {
    json harm = json::array();
    for (const auto& [a, b] : e->harmonics) harm.push_back(json::array({a, b}));
    lift = json{{"rotation", e->rotation}, {"harmonics", harm}};
  }
  json label = nullptr;
  try {
    label = kac_label_of(r.a_prime, r.K_prime).to_string();
  } catch (const Error&) {
  }
  const auto& p = r.path;
  return json{{"schema", kSchema},
              {"status", "ok"},
              {"algebra", r.a_prime.algebra()->label()},
              {"K_prime", r.K_prime},
              {"a_prime", automorphism_to_json(r.a_prime)},
              {"a_prime_is_identity", max_abs(r.a_prime.matrix() - CMatrix::Identity(r.a_prime.dim(), r.a_prime.dim())) <= r.options.order_tol},
              {"kac_label", label},
              {"dims", r.dims},
              {"kappa", r.kappa},
              {"flipped", r.flipped},
              {"residuals",
               {{"integrality", r.integrality_residual},
                {"order", r.order_residual},
                {"semisimplicity", r.semisimplicity_residual},
                {"shift", r.shift_residual},
                {"ode", p.ode_residual},
                {"determinant_drift", p.determinant_drift},
                {"monodromy", r.monodromy.residual},
                {"transport_truncation", r.transported.truncation},
                {"quadrature", rect.quadrature_error},
                {"pushforward", rect.pushforward_residual}}},
              {"monodromy", {{"g", to_json(r.monodromy.g)}, {"checks", r.monodromy.checks}}},
              {"rectification", {{"kappa", rect.kappa}, {"samples", rect.samples}, {"lift", lift}}},
              {"transport", {{"window", r.transported.window}}},
              {"path",
               {{"steps_per_period", p.steps_per_period},
                {"periods", r.options.ode.periods},
                {"adaptive", r.options.ode.adaptive},
                {"substeps", p.substeps},
                {"gamma_end", to_json(p.nodes[static_cast<std::size_t>(p.steps_per_period)])}}},
              {"tolerances",
               {{"integrality", r.options.integrality_tol},
                {"order", r.options.order_tol},
                {"transport", r.options.transport_tol},
                {"monodromy", r.options.monodromy_tol},
                {"ode_local", r.options.ode.local_tol}}}};
}

json classification_to_json(const ClassificationReport& rep) {
  json entries = json::array();
  for (const auto& e : rep.entries) {
    entries.push_back(json{{"label", e.label.to_string()},
                           {"s", e.label.s},
                           {"marks", e.label.marks},
                           {"order", e.order},
                           {"dims", e.dims},
                           {"bracket_residual", e.bracket_residual},
                           {"identified", e.identified},
                           {"automorphism", automorphism_to_json(e.automorphism)}});
  }
  return json{{"schema", kSchema},
              {"status", "ok"},
              {"algebra", rep.algebra},
              {"K", rep.K},
              {"r", rep.r},
              {"count", rep.entries.size()},
              {"oracle_count", rep.oracle_count ? json(*rep.oracle_count) : json(nullptr)},
              {"oracle_agreement", rep.oracle_agreement},
              {"entries", entries}};
}

json error_to_json(const Error& err) {
  const bool rejection = is_mathematical_rejection(err.kind());
  json out{{"schema", kSchema},
           {"status", rejection ? "rejected" : "error"},
           {"error", std::string(to_string(err.kind()))},
           {"message", err.what()}};
  const auto cond = violated_condition(err.kind());
  if (!cond.empty()) out["violated_condition"] = std::string(cond);
  return out;
}

json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaError, "'" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema") || doc["schema"] != kSchema) {
    fail(ErrorKind::SchemaError, "'" + path + "' lacks \"schema\": \"" + std::string(kSchema) + "\"");
  }
  return doc;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace loopgrad::io
