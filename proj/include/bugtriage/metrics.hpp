#pragma once

#include <cstddef>
#include <span>

#include "bugtriage/corpus.hpp"

namespace bugtriage {

/// Counts with Bug as the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept;
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws InputError when the lengths differ.
ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> predicted);

/// accuracy  = (TP + TN) / total
/// precision = TP / (TP + FP)
/// recall    = TP / (TP + FN)
/// f_measure = 2 P R / (P + R), evaluated as 2 TP / (2 TP + FP + FN) so the
///             result never leaves [min(P, R), max(P, R)]
/// A zero denominator yields 0 and raises the matching *_undefined flag.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f_measure_undefined = false;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Throws InputError on an empty matrix.
Metrics metrics(const ConfusionMatrix& cm);

/// Per-metric arithmetic mean; a flag is set when any input had it set.
/// Throws InputError on an empty span.
Metrics mean(std::span<const Metrics> items);

}  // namespace bugtriage
