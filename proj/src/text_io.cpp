#include "cubetest/text_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cubetest/errors.hpp"

namespace cubetest {

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(std::string_view token) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw InputError("expected a number, got '" + std::string(token) + "'");
  }
  return value;
}

std::int64_t parse_int(std::string_view token) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw InputError("expected an integer, got '" + std::string(token) + "'");
  }
  return value;
}

std::uint64_t parse_uint(std::string_view token) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw InputError("expected a non-negative integer, got '" + std::string(token) + "'");
  }
  return value;
}

bool parse_bool(std::string_view token) {
  if (token == "true" || token == "1" || token == "on") return true;
  if (token == "false" || token == "0" || token == "off") return false;
  throw InputError("expected a boolean, got '" + std::string(token) + "'");
}

KeyValueDocument KeyValueDocument::parse(std::string_view text) {
  KeyValueDocument doc;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream words(line);
    KeyValueLine entry;
    entry.line_number = number;
    if (!(words >> entry.key) || entry.key.front() == '#') continue;
    for (std::string token; words >> token;) {
      if (token.front() == '#') break;
      entry.tokens.push_back(std::move(token));
    }
    doc.lines_.push_back(std::move(entry));
  }
  return doc;
}

KeyValueDocument KeyValueDocument::read_file(const std::string& path) { return parse(read_text_file(path)); }

const KeyValueLine* KeyValueDocument::find(std::string_view key) const {
  for (const auto& line : lines_) {
    if (line.key == key) return &line;
  }
  return nullptr;
}

std::vector<const KeyValueLine*> KeyValueDocument::find_all(std::string_view key) const {
  std::vector<const KeyValueLine*> out;
  for (const auto& line : lines_) {
    if (line.key == key) out.push_back(&line);
  }
  return out;
}

std::string KeyValueDocument::string_value(std::string_view key) const {
  const auto* line = find(key);
  if (line == nullptr) throw InputError("missing key '" + std::string(key) + "'");
  if (line->tokens.size() != 1) {
    throw InputError("line " + std::to_string(line->line_number) + ": '" + std::string(key) + "' takes one value");
  }
  return line->tokens.front();
}

double KeyValueDocument::double_value(std::string_view key) const { return parse_double(string_value(key)); }
std::int64_t KeyValueDocument::int_value(std::string_view key) const { return parse_int(string_value(key)); }
std::uint64_t KeyValueDocument::uint_value(std::string_view key) const { return parse_uint(string_value(key)); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw InputError("failed writing '" + path + "'");
}

std::string format_table(const FunctionTable& f, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  const int n = f.dimension();
  out += "dim " + std::to_string(n) + "\n";
  // Lines run in lexicographic order of the bitstring, coordinate 1 leftmost.
  for (std::uint64_t rank = 0; rank < f.size(); ++rank) {
    std::uint64_t mask = 0;
    for (int i = 0; i < n; ++i) {
      if ((rank >> (n - 1 - i)) & 1U) mask |= std::uint64_t{1} << i;
    }
    out += CubePoint(n, mask).to_string();
    out += ' ';
    out += format_double(f.at(mask));
    out += '\n';
  }
  return out;
}

FunctionTable parse_table(std::string_view text) {
  const auto doc = KeyValueDocument::parse(text);
  const auto& lines = doc.lines();
  if (lines.empty() || lines.front().key != "dim" || lines.front().tokens.size() != 1) {
    throw InputError("table must start with 'dim n'");
  }
  const auto n = parse_int(lines.front().tokens.front());
  if (n < 1 || n > kMaxTableDimension) throw InputError("table dimension out of range");
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> values(size, 0.0);
  std::vector<bool> seen(size, false);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    const std::string where = "line " + std::to_string(line.line_number) + ": ";
    if (line.tokens.size() != 1) throw InputError(where + "expected 'bitstring value'");
    if (line.key.size() != static_cast<std::size_t>(n)) throw InputError(where + "bitstring length differs from dim");
    const auto point = CubePoint::parse(line.key);
    if (seen[point.bits()]) throw InputError(where + "duplicate point " + line.key);
    seen[point.bits()] = true;
    values[point.bits()] = parse_double(line.tokens.front());
  }
  for (std::size_t x = 0; x < size; ++x) {
    if (!seen[x]) throw InputError("missing point " + CubePoint(static_cast<int>(n), x).to_string());
  }
  return FunctionTable(static_cast<int>(n), std::move(values));
}

FunctionTable read_table_file(const std::string& path) { return parse_table(read_text_file(path)); }

}  // namespace cubetest
