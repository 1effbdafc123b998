#include "bugtriage/feature_matrix.hpp"

#include <algorithm>

#include "bugtriage/error.hpp"

namespace bugtriage {

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  FeatureMatrix out(indices.size(), cols_);
  out.column_names = column_names;
  out.frequency_columns = frequency_columns;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
    if (!row_ids.empty()) out.row_ids.push_back(row_ids[indices[i]]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::slice_columns(std::size_t begin, std::size_t end) const {
  if (begin > end || end > cols_) throw Error("slice_columns: range out of bounds");
  FeatureMatrix out(rows_, end - begin);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto src = row(r);
    std::copy(src.begin() + begin, src.begin() + end, out.row(r).begin());
  }
  if (!column_names.empty()) {
    out.column_names.assign(column_names.begin() + begin, column_names.begin() + end);
  }
  out.row_ids = row_ids;
  out.frequency_columns =
      frequency_columns > begin ? std::min(frequency_columns, end) - begin : 0;
  return out;
}

FeatureMatrix FeatureMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  FeatureMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw InputError("from_rows: ragged rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

}  // namespace bugtriage
