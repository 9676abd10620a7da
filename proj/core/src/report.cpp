#include "ccrm/report.hpp"

#include <fmt/format.h>

#include "ccrm/tsv.hpp"
#include "json.hpp"

namespace ccrm::report {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kCorner = "label";

void require_nonempty(const LabeledMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw Error("cannot emit an empty matrix");
}

void check_labels(const std::vector<std::string>& labels, const std::string& source, const char* what) {
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw ParseError(source, 1, 1, fmt::format("duplicate {} label '{}'", what, l));
  }
}

}  // namespace

std::string emit_matrix(const LabeledMatrix& matrix, Format format) {
  require_nonempty(matrix);
  const auto m = matrix.sorted();
  if (format == Format::TSV) {
    std::string out(kCorner);
    for (const auto& c : m.col_labels()) out += "\t" + c;
    out += "\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
      out += m.row_labels()[r];
      for (std::size_t c = 0; c < m.cols(); ++c) {
        out += "\t";
        if (const auto& v = m.at(r, c)) out += tsv::format_double(*v);
      }
      out += "\n";
    }
    return out;
  }
  json values = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const auto& v = m.at(r, c);
      row.push_back(v ? json(*v) : json(nullptr));
    }
    values.push_back(std::move(row));
  }
  json j{{"rows", m.row_labels()}, {"cols", m.col_labels()}, {"values", std::move(values)}};
  return j.dump(1) + "\n";
}

void write_matrix(const fs::path& path, const LabeledMatrix& matrix, Format format) {
  tsv::write_file(path, emit_matrix(matrix, format));
}

LabeledMatrix parse_matrix_tsv(std::string_view text, const std::string& source) {
  const auto table = tsv::parse(text, source);
  if (table.header.empty() || table.header.front() != kCorner) {
    throw ParseError(source, 1, 1, fmt::format("matrix header must start with '{}'", kCorner));
  }
  std::vector<std::string> cols(table.header.begin() + 1, table.header.end());
  std::vector<std::string> rows;
  for (const auto& r : table.rows) rows.push_back(r.fields[0]);
  check_labels(cols, source, "column");
  check_labels(rows, source, "row");
  LabeledMatrix m(rows, cols);
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (!table.rows[r].fields[c + 1].empty()) m.at(r, c) = tsv::parse_double(table.rows[r], c + 1, source);
  return m;
}

LabeledMatrix parse_matrix_json(std::string_view text, const std::string& source) {
  try {
    const auto j = json::parse(text);
    const auto rows = j.at("rows").get<std::vector<std::string>>();
    const auto cols = j.at("cols").get<std::vector<std::string>>();
    check_labels(cols, source, "column");
    check_labels(rows, source, "row");
    const auto& values = j.at("values");
    if (values.size() != rows.size()) throw ParseError(source, 1, 1, "row count does not match 'rows'");
    LabeledMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (values[r].size() != cols.size()) {
        throw ParseError(source, 1, 1, fmt::format("row '{}' has {} cells, expected {}", rows[r], values[r].size(), cols.size()));
      }
      for (std::size_t c = 0; c < cols.size(); ++c)
        if (!values[r][c].is_null()) m.at(r, c) = values[r][c].get<double>();
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(source, 1, 1, e.what());
  }
}

LabeledMatrix read_matrix(const fs::path& path) {
  const auto text = tsv::read_file(path);
  const auto name = path.filename().string();
  return path.extension() == ".json" ? parse_matrix_json(text, name) : parse_matrix_tsv(text, name);
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace ccrm::report
