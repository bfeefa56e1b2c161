#include "rpl/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rpl/errors.hpp"

namespace rpl {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_value(const CsvValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += quote(cells[i]);
  }
  out += '\n';
}

}  // namespace

std::string render_csv(const std::vector<std::string>& schema, const std::vector<std::vector<CsvValue>>& records,
                       const std::vector<std::string>& metadata) {
  require(!schema.empty(), "CSV schema needs at least one column");
  std::string out;
  for (const auto& m : metadata) {
    require(m.find('\n') == std::string::npos, "CSV metadata lines cannot contain newlines");
    out += "# " + m + "\n";
  }
  append_row(out, schema);
  for (const auto& r : records) {
    require(r.size() == schema.size(), "CSV record length does not match the schema");
    std::vector<std::string> cells;
    for (const auto& v : r) cells.push_back(format_value(v));
    append_row(out, cells);
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.close();
  if (!f) throw std::runtime_error("failed writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void emit_csv(const std::string& path, const std::vector<std::string>& schema,
              const std::vector<std::vector<CsvValue>>& records, const std::vector<std::string>& metadata) {
  write_text_file(path, render_csv(schema, records, metadata));
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::size_t pos = 0;
  const std::size_t n = text.size();
  bool header_done = false;
  while (pos < n) {
    if (!header_done && text[pos] == '#') {
      const auto end = text.find('\n', pos);
      std::string line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
      line = line.size() >= 2 && line[1] == ' ' ? line.substr(2) : line.substr(1);
      t.metadata.push_back(line);
      pos = end == std::string::npos ? n : end + 1;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (; pos < n; ++pos) {
      const char c = text[pos];
      if (quoted) {
        if (c == '"') {
          if (pos + 1 < n && text[pos + 1] == '"') {
            cell += '"';
            ++pos;
          } else {
            quoted = false;
          }
        } else {
          cell += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        cells.push_back(cell);
        cell.clear();
      } else if (c == '\n') {
        ++pos;
        break;
      } else {
        cell += c;
      }
    }
    require(!quoted, "unterminated quoted CSV field");
    cells.push_back(cell);
    if (!header_done) {
      t.columns = cells;
      header_done = true;
    } else {
      require(cells.size() == t.columns.size(), "CSV row length does not match the header");
      t.rows.push_back(cells);
    }
  }
  return t;
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_text_file(path)); }

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ValidationError("CSV has no column " + name);
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  const auto& s = rows.at(row).at(column(name));
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  return std::stod(s);
}

}  // namespace rpl
