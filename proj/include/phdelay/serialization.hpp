#pragma once

// JSON interchange for systems, matrices and history functions.
//
// System documents are objects with a "kind" tag, the dimensions "n" and
// "m", "tau" for the delay kinds, one array-of-rows per matrix field and an
// optional "theta" for "delay_ph". Unknown keys are rejected. Output is
// canonical: sorted keys, 17 significant digits per real.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "phdelay/model.hpp"

namespace phdelay {

using Json = nlohmann::json;

/// Structural parse only (schema, shapes). Throws ParseError.
System parse_system(const std::string& text);

/// parse_system followed by validate(); violations are thrown together as a
/// ValidationError.
System read_system(const std::string& text, const Tolerance& tol = {});

std::string write_system(const System& system);
Json system_to_json(const System& system);

/// Matrix document: a bare array of row arrays.
Matrix parse_matrix(const Json& value, const std::string& field);
Matrix read_matrix(const std::string& text);
Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);

/// {"grid": [...], "values": [[row of state 1], ...]}
HistoryFunction read_history(const std::string& text);

/// Pretty printer with sorted keys, numeric rows on one line and reals at
/// 17 significant digits. Non-finite reals are written as null.
std::string dump_canonical(const Json& value);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace phdelay
