#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ccrm/error.hpp"
#include "ccrm/matrix.hpp"

namespace ccrm::report {

enum class Format { TSV, JSON };

// Rows and columns are written in lexicographic order. Missing cells become
// an empty field (TSV) or null (JSON). Numbers use the shortest text that
// reads back to the same double.
std::string emit_matrix(const LabeledMatrix& matrix, Format format);
void write_matrix(const std::filesystem::path& path, const LabeledMatrix& matrix, Format format);

LabeledMatrix parse_matrix_tsv(std::string_view text, const std::string& source = "<memory>");
LabeledMatrix parse_matrix_json(std::string_view text, const std::string& source = "<memory>");
LabeledMatrix read_matrix(const std::filesystem::path& path);  // format from the extension

enum class Ramp {
  Sequential,  // white to dark blue
  Diverging,   // red, white at 0, blue
};

struct HeatmapOptions {
  std::string title;
  Ramp ramp = Ramp::Sequential;
  // Color scale bounds. Defaults: data range (sequential) or ±max|v| (diverging).
  std::optional<double> min;
  std::optional<double> max;
  // (row, col) cells drawn with a dot, e.g. a language and its own cuisine.
  std::set<std::pair<std::string, std::string>> self_cells;
  double cell_size = 18;
};

// One rect per cell; a cross over missing cells and a dot on self cells. A
// missing self cell gets only the cross.
std::string render_heatmap(const LabeledMatrix& matrix, const HeatmapOptions& options = {});

// One polyline per series, x = rank (1-based), y = value. Series with one
// value get a point marker; empty series are skipped. The legend is ordered
// by peak value, highest first. Throws Error when every series is empty.
std::string render_ranked_curves(const std::map<std::string, std::vector<double>>& series, const std::string& title,
                                 const std::string& y_label = "Jaccard");

struct LineSeries {
  std::string name;
  std::vector<std::pair<double, std::optional<double>>> points;  // gaps break the line
};

std::string render_line_chart(const std::vector<LineSeries>& series, const std::string& title,
                              const std::string& x_label, const std::string& y_label);

// Escapes &, <, >, " for XML text and attributes.
std::string xml_escape(std::string_view text);

}  // namespace ccrm::report
