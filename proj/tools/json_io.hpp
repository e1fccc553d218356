#pragma once

// JSON encodings of algebras, automorphisms, loop elements, grading operators
// and the reports produced by the CLI (schema "loopgrad/1").

#include <string>

#include "json.hpp"
#include "loopgrad/classify.hpp"
#include "loopgrad/error.hpp"
#include "loopgrad/normalizer.hpp"

namespace loopgrad::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "loopgrad/1";

json to_json(Complex z);
Complex complex_from_json(const json& j);
json to_json(const CVector& v);
CVector vector_from_json(const json& j, int dim);
/// {rows, cols, data: row-major [[re, im], ...]}
json to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

json algebra_to_json(const SimpleLieAlgebra& alg);

/// "identity", "diagram" (x -> -x^T), {"group": matrix} for Ad(g), or a
/// dim x dim matrix in the algebra basis.
AlgebraAutomorphism automorphism_from_json(const AlgebraPtr& alg, const json& j, double tol);
json automorphism_to_json(const AlgebraAutomorphism& a);

/// Reads algebra, K and automorphism from a document.
TwistPtr twist_from_json(const json& doc, double tol);

json modes_to_json(const LoopElement& xi);
LoopElement modes_from_json(const TwistPtr& twist, const json& modes, double tol);
json loop_element_to_json(const LoopElement& xi);
LoopElement loop_element_from_json(const json& doc, double tol);

json vector_field_to_json(const VectorFieldK& X);
VectorFieldK vector_field_from_json(const json& j, int K);
json operator_to_json(const GradingOperator& Q);
GradingOperator operator_from_json(const json& doc, double tol);

json table_to_json(const GradationTable& table, double bracket_residual);
json normalization_to_json(const NormalizationResult& r);
json classification_to_json(const ClassificationReport& rep);
json error_to_json(const Error& err);

/// Throws IoError or SchemaError; checks the schema tag.
json read_document(const std::string& path);
/// Deterministic serialization used for every report.
std::string dump(const json& j);

}  // namespace loopgrad::io
