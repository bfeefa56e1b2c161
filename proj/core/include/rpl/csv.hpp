#pragma once

#include <string>
#include <variant>
#include <vector>

namespace rpl {

using CsvValue = std::variant<double, long long, std::string>;

// Doubles use 17 significant digits ("%.17g"); inf/nan print as inf, -inf, nan.
std::string format_double(double v);
std::string format_value(const CsvValue& v);

struct CsvTable {
  std::vector<std::string> metadata;  // "# ..." lines before the header, without the "# "
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws when absent
  double number(std::size_t row, const std::string& name) const;
};

// Metadata lines, header, records; LF endings, RFC 4180 quoting when needed.
std::string render_csv(const std::vector<std::string>& schema, const std::vector<std::vector<CsvValue>>& records,
                       const std::vector<std::string>& metadata = {});

// Writes render_csv(...) to path; I/O failures throw std::runtime_error naming the path.
void emit_csv(const std::string& path, const std::vector<std::string>& schema,
              const std::vector<std::vector<CsvValue>>& records, const std::vector<std::string>& metadata = {});

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

// Whole-file helpers shared with JSON output.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace rpl
