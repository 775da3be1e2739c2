#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pdq/expr.hpp"

namespace pdq {

/// Key order in reports is part of the output contract: runs with the same
/// config and seed must produce byte-identical files.
using ordered_json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

inline void write_text_file(const std::string& path,
                            std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(content.data(),
            static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("short write to " + path);
}

inline std::string json_to_string(const ordered_json& j) {
  return j.dump(2) + "\n";
}

inline void write_json_file(const std::string& path, const ordered_json& j) {
  write_text_file(path, json_to_string(j));
}

inline ordered_json read_json_file(const std::string& path) {
  try {
    return ordered_json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("invalid json in " + path + ": " + e.what());
  }
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

/// Shortest decimal that round-trips the value, so formatted numbers are a
/// pure function of the bits.
inline std::string format_double(double v) { return detail::format_number(v); }

inline std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

}  // namespace pdq
