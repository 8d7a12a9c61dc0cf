#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dtph/matcore.hpp"
#include "dtph/system.hpp"

namespace dtph {

/// Library version written into every emitted artifact.
std::string tool_version();

struct SystemFile {
  DescriptorSystem system;
  std::string name;
  std::vector<std::string> warnings;
  /// system_hash(system).
  std::string hash;
};

/// JSON object with "E","A","B","C","D" as row-major nested arrays whose
/// entries are numbers or [re, im] pairs, and optional "time_domain"
/// ("discrete" or "continuous"). A missing "E" means the identity. Unknown
/// keys produce warnings. Throws Parse with the offending key, or the byte
/// offset for malformed JSON.
SystemFile parse_system_json(const std::string& text, const std::string& origin = "<input>");
SystemFile load_system_file(const std::string& path);

Matrix matrix_from_json(const nlohmann::json& j, const std::string& where);
/// Real entries as numbers, the others as [re, im].
nlohmann::json matrix_to_json(const Matrix& m);
nlohmann::json system_to_json(const DescriptorSystem& sys);

std::string sha256_hex(const std::string& bytes);
/// SHA-256 of the canonical (sorted-key, compact) JSON form, so formatting
/// of the source file does not matter.
std::string system_hash(const DescriptorSystem& sys);

/// Writes text to path, throwing Parse when the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dtph
