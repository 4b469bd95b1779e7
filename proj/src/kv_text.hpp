// Shared line-oriented "key: value" parsing for config and suite files.
#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "hado/errors.hpp"

namespace hado::detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct KvLine {
  std::string key;
  std::string value;
  int line_number = 0;
};

// Returns false for blank/comment lines; throws ParseError when a non-blank
// line has no "key: value" shape.
inline bool parse_kv_line(const std::string& raw, int line_number, KvLine* out) {
  std::string line = raw;
  const auto hash = line.find('#');
  if (hash != std::string::npos) line = line.substr(0, hash);
  line = trim(line);
  if (line.empty()) return false;
  const auto colon = line.find(':');
  if (colon == std::string::npos)
    throw ParseError("expected 'key: value', got '" + line + "'", line_number);
  out->key = trim(line.substr(0, colon));
  out->value = trim(line.substr(colon + 1));
  out->line_number = line_number;
  if (out->key.empty()) throw ParseError("empty key", line_number);
  return true;
}

inline double parse_double(const KvLine& kv) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(kv.value, &pos);
    if (pos != kv.value.size())
      throw ParseError("trailing characters after number in '" + kv.key + "'",
                       kv.line_number);
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("bad number for '" + kv.key + "': '" + kv.value + "'",
                     kv.line_number);
  }
}

inline int parse_int(const KvLine& kv) {
  const double v = parse_double(kv);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ParseError("expected integer for '" + kv.key + "'", kv.line_number);
  return i;
}

inline bool parse_bool(const KvLine& kv) {
  if (kv.value == "true" || kv.value == "1") return true;
  if (kv.value == "false" || kv.value == "0") return false;
  throw ParseError("expected true/false for '" + kv.key + "'", kv.line_number);
}

inline std::vector<double> parse_doubles(const KvLine& kv, std::size_t expected) {
  std::istringstream iss(kv.value);
  std::vector<double> out;
  double v;
  while (iss >> v) out.push_back(v);
  if (!iss.eof() || out.size() != expected)
    throw ParseError("expected " + std::to_string(expected) + " numbers for '" +
                         kv.key + "'",
                     kv.line_number);
  return out;
}

}  // namespace hado::detail
