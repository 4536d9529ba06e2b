#include "phdelay/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "phdelay/errors.hpp"

namespace phdelay {

namespace {

struct Schema {
  const char* kind;
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

const std::vector<Schema>& schemas() {
  static const std::vector<Schema> s = {
      {"standard_lti", {"kind", "n", "m", "A", "B", "C"}, {}},
      {"standard_ph", {"kind", "n", "m", "H", "J", "R", "G"}, {}},
      {"general_delay", {"kind", "n", "m", "tau", "A0", "A1", "B", "C"}, {}},
      {"delay_ph", {"kind", "n", "m", "tau", "H", "J", "R", "Z", "G"}, {"theta"}},
  };
  return s;
}

Eigen::Index positive_dim(const Json& doc, const char* key) {
  const Json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ParseError(std::string("field '") + key + "' must be a positive integer");
  }
  return static_cast<Eigen::Index>(v.get<long long>());
}

double real_field(const Json& doc, const char* key) {
  const Json& v = doc.at(key);
  if (!v.is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

Matrix matrix_field(const Json& doc, const std::string& key, Eigen::Index rows,
                    Eigen::Index cols) {
  Matrix m = parse_matrix(doc.at(key), key);
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << "field '" << key << "' has shape " << m.rows() << "x" << m.cols() << ", expected "
       << rows << "x" << cols;
    throw ParseError(os.str());
  }
  return m;
}

void write_number(std::ostream& os, double x) {
  if (!std::isfinite(x)) {
    os << "null";
    return;
  }
  if (x == 0.0 && std::signbit(x)) {
    os << "-0.0";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  os << buf;
}

bool is_flat(const Json& v) {
  if (!v.is_array()) return false;
  for (const auto& e : v) {
    if (e.is_object()) return false;
    if (e.is_array()) {
      for (const auto& x : e) {
        if (x.is_array() || x.is_object()) return false;
      }
    }
  }
  return true;
}

void dump(std::ostream& os, const Json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {  // std::map: sorted
        if (!first) os << ",\n";
        first = false;
        os << pad << "  " << Json(it.key()).dump() << ": ";
        dump(os, it.value(), indent + 2);
      }
      os << "\n" << pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (is_flat(v)) {
        os << "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) os << ", ";
          dump(os, v[i], indent);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",\n";
        os << pad << "  ";
        dump(os, v[i], indent + 2);
      }
      os << "\n" << pad << "]";
      return;
    }
    case Json::value_t::number_float:
      write_number(os, v.get<double>());
      return;
    default:
      os << v.dump();
  }
}

}  // namespace

Matrix parse_matrix(const Json& value, const std::string& field) {
  if (!value.is_array() || value.empty()) {
    throw ParseError("field '" + field + "' must be a non-empty array of row arrays");
  }
  const auto rows = static_cast<Eigen::Index>(value.size());
  Eigen::Index cols = -1;
  Matrix m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = value[static_cast<std::size_t>(i)];
    if (!row.is_array()) {
      throw ParseError("field '" + field + "' row " + std::to_string(i) + " is not an array");
    }
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError("field '" + field + "' row " + std::to_string(i) + " has " +
                       std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Json& x = row[static_cast<std::size_t>(j)];
      if (!x.is_number()) {
        throw ParseError("field '" + field + "' entry (" + std::to_string(i) + "," +
                         std::to_string(j) + ") is not a number");
      }
      m(i, j) = x.get<double>();
    }
  }
  return m;
}

System parse_system(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("system document must be a JSON object");
  if (!doc.contains("kind") || !doc["kind"].is_string()) {
    throw ParseError("missing string field 'kind'");
  }
  const std::string kind = doc["kind"].get<std::string>();
  const Schema* schema = nullptr;
  for (const auto& s : schemas()) {
    if (kind == s.kind) schema = &s;
  }
  if (!schema) throw ParseError("unknown kind '" + kind + "'");

  std::set<std::string> allowed(schema->required.begin(), schema->required.end());
  allowed.insert(schema->optional.begin(), schema->optional.end());
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ParseError("unknown field '" + it.key() + "' for kind '" + kind + "'");
    }
  }
  for (const auto& key : schema->required) {
    if (!doc.contains(key)) {
      throw ParseError("missing field '" + key + "' for kind '" + kind + "'");
    }
  }

  const Eigen::Index n = positive_dim(doc, "n");
  const Eigen::Index m = positive_dim(doc, "m");
  if (kind == "standard_lti") {
    return StandardLTISystem{matrix_field(doc, "A", n, n), matrix_field(doc, "B", n, m),
                             matrix_field(doc, "C", m, n)};
  }
  if (kind == "standard_ph") {
    return StandardPHSystem{matrix_field(doc, "H", n, n), matrix_field(doc, "J", n, n),
                            matrix_field(doc, "R", n, n), matrix_field(doc, "G", n, m)};
  }
  if (kind == "general_delay") {
    return GeneralDelaySystem{matrix_field(doc, "A0", n, n), matrix_field(doc, "A1", n, n),
                              matrix_field(doc, "B", n, m), matrix_field(doc, "C", m, n),
                              real_field(doc, "tau")};
  }
  DelayPHSystem sys;
  sys.H = matrix_field(doc, "H", n, n);
  sys.J = matrix_field(doc, "J", n, n);
  sys.R = matrix_field(doc, "R", n, n);
  sys.Z = matrix_field(doc, "Z", n, n);
  sys.G = matrix_field(doc, "G", n, m);
  sys.tau = real_field(doc, "tau");
  if (doc.contains("theta")) sys.theta = matrix_field(doc, "theta", n, n);
  return sys;
}

System read_system(const std::string& text, const Tolerance& tol) {
  System sys = parse_system(text);
  auto violations = validate(sys, tol);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return sys;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json system_to_json(const System& system) {
  Json doc;
  doc["kind"] = kind_name(system);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        doc["n"] = s.n();
        doc["m"] = s.m();
        if constexpr (std::is_same_v<T, StandardLTISystem>) {
          doc["A"] = matrix_to_json(s.A);
          doc["B"] = matrix_to_json(s.B);
          doc["C"] = matrix_to_json(s.C);
        } else if constexpr (std::is_same_v<T, StandardPHSystem>) {
          doc["H"] = matrix_to_json(s.H);
          doc["J"] = matrix_to_json(s.J);
          doc["R"] = matrix_to_json(s.R);
          doc["G"] = matrix_to_json(s.G);
        } else if constexpr (std::is_same_v<T, GeneralDelaySystem>) {
          doc["A0"] = matrix_to_json(s.A0);
          doc["A1"] = matrix_to_json(s.A1);
          doc["B"] = matrix_to_json(s.B);
          doc["C"] = matrix_to_json(s.C);
          doc["tau"] = s.tau;
        } else {
          doc["H"] = matrix_to_json(s.H);
          doc["J"] = matrix_to_json(s.J);
          doc["R"] = matrix_to_json(s.R);
          doc["Z"] = matrix_to_json(s.Z);
          doc["G"] = matrix_to_json(s.G);
          doc["tau"] = s.tau;
          if (s.theta) doc["theta"] = matrix_to_json(*s.theta);
        }
      },
      system);
  return doc;
}

std::string write_system(const System& system) { return dump_canonical(system_to_json(system)); }

Matrix read_matrix(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  Matrix m = parse_matrix(doc, "matrix");
  if (!all_finite(m)) throw ParseError("matrix has non-finite entries");
  return m;
}

HistoryFunction read_history(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("grid") || !doc.contains("values")) {
    throw ParseError("history document needs fields 'grid' and 'values'");
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() != "grid" && it.key() != "values") {
      throw ParseError("unknown field '" + it.key() + "' in history document");
    }
  }
  HistoryFunction h;
  const Json& grid = doc["grid"];
  if (!grid.is_array()) throw ParseError("field 'grid' must be an array of numbers");
  for (const auto& t : grid) {
    if (!t.is_number()) throw ParseError("field 'grid' must be an array of numbers");
    h.grid.push_back(t.get<double>());
  }
  h.values = parse_matrix(doc["values"], "values");
  return h;
}

std::string dump_canonical(const Json& value) {
  std::ostringstream os;
  dump(os, value, 0);
  os << "\n";
  return os.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace phdelay
