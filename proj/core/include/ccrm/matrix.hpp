#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ccrm {

/// Dense row/column-labelled matrix whose cells may be missing.
///
/// All measure matrices (similarity, understanding, bias) are stored this way;
/// a missing cell is distinct from a zero.
class LabeledMatrix {
 public:
  LabeledMatrix() = default;
  LabeledMatrix(std::vector<std::string> row_labels, std::vector<std::string> col_labels);

  std::size_t rows() const { return row_labels_.size(); }
  std::size_t cols() const { return col_labels_.size(); }
  bool empty() const { return cells_.empty(); }

  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::string>& col_labels() const { return col_labels_; }

  std::optional<std::size_t> row_index(std::string_view label) const;
  std::optional<std::size_t> col_index(std::string_view label) const;

  const std::optional<double>& at(std::size_t r, std::size_t c) const { return cells_[r * cols() + c]; }
  std::optional<double>& at(std::size_t r, std::size_t c) { return cells_[r * cols() + c]; }

  // Label-based lookup; std::nullopt for unknown labels as well as missing cells.
  std::optional<double> get(std::string_view row, std::string_view col) const;

  // Same cells with rows and columns sorted lexicographically by label.
  LabeledMatrix sorted() const;

  bool operator==(const LabeledMatrix&) const = default;

 private:
  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
  std::vector<std::optional<double>> cells_;
};

}  // namespace ccrm
