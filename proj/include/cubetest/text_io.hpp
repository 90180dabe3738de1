#pragma once

// Line-oriented text formats shared by the library and the CLI.
//
// Every format is a sequence of lines `key token token ...`; blank lines and
// lines starting with '#' are ignored. Numbers are written in shortest
// round-trip form so that files are byte-stable across runs.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cubetest/cube.hpp"

namespace cubetest {

std::string format_double(double value);
double parse_double(std::string_view token);
std::int64_t parse_int(std::string_view token);
std::uint64_t parse_uint(std::string_view token);
bool parse_bool(std::string_view token);

struct KeyValueLine {
  std::string key;
  std::vector<std::string> tokens;
  int line_number = 0;
};

// Keys may repeat; order is preserved.
class KeyValueDocument {
 public:
  static KeyValueDocument parse(std::string_view text);
  static KeyValueDocument read_file(const std::string& path);

  const std::vector<KeyValueLine>& lines() const { return lines_; }
  const KeyValueLine* find(std::string_view key) const;
  std::vector<const KeyValueLine*> find_all(std::string_view key) const;
  bool has(std::string_view key) const { return find(key) != nullptr; }

  // Single-token accessors; throw InputError on missing keys or bad tokens.
  std::string string_value(std::string_view key) const;
  double double_value(std::string_view key) const;
  std::int64_t int_value(std::string_view key) const;
  std::uint64_t uint_value(std::string_view key) const;

 private:
  std::vector<KeyValueLine> lines_;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

// Function-table format: optional '#' comment lines, then `dim n`, then one
// line `bitstring value` per point with coordinate 1 leftmost.
std::string format_table(const FunctionTable& f, const std::vector<std::string>& comments = {});
FunctionTable parse_table(std::string_view text);
FunctionTable read_table_file(const std::string& path);

}  // namespace cubetest
