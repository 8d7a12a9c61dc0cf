#include "dtph/system_io.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "dtph/error.hpp"

#ifndef DTPH_VERSION
#define DTPH_VERSION "0.0.0"
#endif

namespace dtph {

namespace {

using nlohmann::json;

const std::set<std::string> kMetadataKeys = {"name", "generator", "input_hash", "operation", "notes",
                                             "description", "schema", "system_hash"};

Scalar entry_from_json(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw Error(ErrorCode::Parse, where + ": entries must be numbers or [re, im] pairs, got " + v.dump());
}

}  // namespace

std::string tool_version() { return DTPH_VERSION; }

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorCode::Parse, where + ": expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) throw Error(ErrorCode::Parse, where + ": row 0 is not an array");
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw Error(ErrorCode::Parse, where + ": row " + std::to_string(i) + " does not have " + std::to_string(cols) +
                                        " entries");
    for (Index k = 0; k < cols; ++k)
      m(i, k) = entry_from_json(row[static_cast<std::size_t>(k)],
                                where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) {
      const Scalar v = m(i, k);
      if (v.imag() == 0.0)
        row.push_back(v.real());
      else
        row.push_back(json::array({v.real(), v.imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json system_to_json(const DescriptorSystem& sys) {
  return json{{"E", matrix_to_json(sys.E)},
              {"A", matrix_to_json(sys.A)},
              {"B", matrix_to_json(sys.B)},
              {"C", matrix_to_json(sys.C)},
              {"D", matrix_to_json(sys.D)},
              {"time_domain", sys.time_domain == TimeDomain::Discrete ? "discrete" : "continuous"}};
}

SystemFile parse_system_json(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, origin + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::Parse, origin + ": top level must be an object");

  SystemFile out;
  DescriptorSystem& s = out.system;
  for (const char* key : {"A", "B", "C", "D"})
    if (!doc.contains(key)) throw Error(ErrorCode::Parse, origin + ": missing key \"" + key + "\"");
  s.A = matrix_from_json(doc["A"], origin + ": A");
  s.B = matrix_from_json(doc["B"], origin + ": B");
  s.C = matrix_from_json(doc["C"], origin + ": C");
  s.D = matrix_from_json(doc["D"], origin + ": D");
  if (doc.contains("E")) {
    s.E = matrix_from_json(doc["E"], origin + ": E");
  } else {
    s.E = Matrix::Identity(s.A.rows(), s.A.rows());
    out.warnings.push_back("no \"E\" given; using the identity");
  }
  // an empty B or C written as [] carries no column count
  if (s.B.size() == 0 && s.B.rows() == 0) s.B = Matrix(s.A.rows(), s.D.rows());
  if (s.C.size() == 0 && s.C.rows() == 0) s.C = Matrix(s.D.rows(), s.A.rows());

  s.time_domain = TimeDomain::Discrete;
  if (doc.contains("time_domain")) {
    const json& td = doc["time_domain"];
    if (td == "discrete")
      s.time_domain = TimeDomain::Discrete;
    else if (td == "continuous")
      s.time_domain = TimeDomain::Continuous;
    else
      throw Error(ErrorCode::Parse, origin + ": time_domain must be \"discrete\" or \"continuous\"");
  }
  if (doc.contains("name") && doc["name"].is_string()) out.name = doc["name"].get<std::string>();
  for (const auto& [key, value] : doc.items()) {
    static const std::set<std::string> known = {"E", "A", "B", "C", "D", "time_domain"};
    if (!known.count(key) && !kMetadataKeys.count(key)) out.warnings.push_back("unknown key \"" + key + "\" ignored");
  }

  const ValidationReport vr = validate(s);
  if (!vr.valid()) {
    std::string msg = origin + ": invalid system:";
    for (const auto& e : vr.errors) msg += " " + e + ";";
    throw Error(ErrorCode::Parse, msg);
  }
  for (const auto& w : vr.warnings) out.warnings.push_back(w);
  out.hash = system_hash(s);
  return out;
}

SystemFile load_system_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system_json(ss.str(), path);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::NumericalFailure, "SHA-256 digest failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::string system_hash(const DescriptorSystem& sys) { return sha256_hex(system_to_json(sys).dump()); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Parse, path + ": cannot write");
  out << text;
  if (!out) throw Error(ErrorCode::Parse, path + ": write failed");
}

}  // namespace dtph
