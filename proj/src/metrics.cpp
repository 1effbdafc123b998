#include "bugtriage/metrics.hpp"

#include "bugtriage/error.hpp"

namespace bugtriage {

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) noexcept {
  tp += o.tp;
  tn += o.tn;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) {
    throw InputError("confusion: " + std::to_string(truth.size()) + " truths vs " +
                     std::to_string(predicted.size()) + " predictions");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool actual = truth[i] == Label::Bug;
    const bool guess = predicted[i] == Label::Bug;
    if (actual && guess) {
      ++cm.tp;
    } else if (!actual && !guess) {
      ++cm.tn;
    } else if (guess) {
      ++cm.fp;
    } else {
      ++cm.fn;
    }
  }
  return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw InputError("metrics: empty confusion matrix");
  Metrics m;
  const auto tp = static_cast<double>(cm.tp);
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  if (cm.tp + cm.fp == 0) {
    m.precision_undefined = true;
  } else {
    m.precision = tp / static_cast<double>(cm.tp + cm.fp);
  }
  if (cm.tp + cm.fn == 0) {
    m.recall_undefined = true;
  } else {
    m.recall = tp / static_cast<double>(cm.tp + cm.fn);
  }
  if (m.precision + m.recall == 0.0) {
    m.f_measure_undefined = true;
  } else {
    // Same value as 2PR / (P + R), but one rounding instead of four.
    m.f_measure = 2.0 * tp / static_cast<double>(2 * cm.tp + cm.fp + cm.fn);
  }
  return m;
}

Metrics mean(std::span<const Metrics> items) {
  if (items.empty()) throw InputError("mean: no metrics to average");
  Metrics out;
  for (const auto& m : items) {
    out.accuracy += m.accuracy;
    out.precision += m.precision;
    out.recall += m.recall;
    out.f_measure += m.f_measure;
    out.precision_undefined = out.precision_undefined || m.precision_undefined;
    out.recall_undefined = out.recall_undefined || m.recall_undefined;
    out.f_measure_undefined = out.f_measure_undefined || m.f_measure_undefined;
  }
  const auto n = static_cast<double>(items.size());
  out.accuracy /= n;
  out.precision /= n;
  out.recall /= n;
  out.f_measure /= n;
  return out;
}

}  // namespace bugtriage
