#include "ccrm/matrix.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ccrm {

LabeledMatrix::LabeledMatrix(std::vector<std::string> row_labels, std::vector<std::string> col_labels)
    : row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)),
      cells_(row_labels_.size() * col_labels_.size()) {}

std::optional<std::size_t> LabeledMatrix::row_index(std::string_view label) const {
  auto it = std::find(row_labels_.begin(), row_labels_.end(), label);
  if (it == row_labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - row_labels_.begin());
}

std::optional<std::size_t> LabeledMatrix::col_index(std::string_view label) const {
  auto it = std::find(col_labels_.begin(), col_labels_.end(), label);
  if (it == col_labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - col_labels_.begin());
}

std::optional<double> LabeledMatrix::get(std::string_view row, std::string_view col) const {
  auto r = row_index(row);
  auto c = col_index(col);
  if (!r || !c) return std::nullopt;
  return at(*r, *c);
}

LabeledMatrix LabeledMatrix::sorted() const {
  auto order = [](const std::vector<std::string>& labels) {
    std::vector<std::size_t> idx(labels.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return labels[a] < labels[b]; });
    return idx;
  };
  const auto ro = order(row_labels_);
  const auto co = order(col_labels_);
  std::vector<std::string> rl, cl;
  for (auto i : ro) rl.push_back(row_labels_[i]);
  for (auto i : co) cl.push_back(col_labels_[i]);
  LabeledMatrix out(std::move(rl), std::move(cl));
  for (std::size_t r = 0; r < ro.size(); ++r)
    for (std::size_t c = 0; c < co.size(); ++c) out.at(r, c) = at(ro[r], co[c]);
  return out;
}

}  // namespace ccrm
