#pragma once

// Locale-independent CSV writing and a small header-aware reader.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stqos::csv {

// Shortest round-trip representation; "nan", "inf", "-inf" for non-finite.
std::string format_number(double value);
std::string format_number(std::int64_t value);
inline std::string format_number(int value) { return format_number(static_cast<std::int64_t>(value)); }
inline std::string format_number(std::size_t value) {
  return format_number(static_cast<std::int64_t>(value));
}

class Row {
 public:
  Row& add(std::string_view text);
  Row& add(const char* text) { return add(std::string_view(text)); }
  Row& add(const std::string& text) { return add(std::string_view(text)); }
  Row& add(double value) { return add(format_number(value)); }
  Row& add(std::int64_t value) { return add(format_number(value)); }
  Row& add(int value) { return add(format_number(value)); }
  Row& add(std::size_t value) { return add(format_number(value)); }
  Row& add_empty() { return add(std::string_view{}); }

  const std::string& str() const { return line_; }

 private:
  std::string line_;
  bool first_ = true;
};

std::string join_header(const std::vector<std::string>& columns);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a column; throws SchemaError naming it when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
  std::vector<double> numeric_column(std::string_view name) const;  // empty cells skipped
};

Table read(const std::filesystem::path& path);
Table parse(std::string_view text);

std::optional<double> parse_number(std::string_view text);

// Truncates any existing file.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace stqos::csv
