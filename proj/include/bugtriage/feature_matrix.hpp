#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bugtriage {

/// Dense row-major matrix with per-column names and per-row report ids.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  /// Column origin tags, e.g. "Tp", "Ts", "V1".
  std::vector<std::string> column_names;
  /// Report id of each row; empty when rows are anonymous.
  std::vector<std::string> row_ids;
  /// Width of the leading frequency block.
  std::size_t frequency_columns = 0;

  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;
  /// Columns [begin, end); frequency_columns is adjusted to what remains.
  FeatureMatrix slice_columns(std::size_t begin, std::size_t end) const;
  /// Builds a matrix from rows of equal width (test and tooling helper).
  static FeatureMatrix from_rows(const std::vector<std::vector<double>>& rows);

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace bugtriage
