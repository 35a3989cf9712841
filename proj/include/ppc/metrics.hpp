#pragma once

#include <cstddef>
#include <optional>

namespace ppc {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend ConfusionCounts operator+(ConfusionCounts a, const ConfusionCounts& b) noexcept { return a += b; }
  bool operator==(const ConfusionCounts&) const = default;
};

// Ratios in [0, 1]; nullopt where the denominator is zero.
struct MetricSet {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f_beta;
  double beta = 2.0;
};

// A = (TP+TN)/total, P = TP/(TP+FP), R = TP/(TP+FN),
// F = (1+b^2)PR/(b^2 P + R). Throws ppc::Error when beta <= 0.
MetricSet metrics(const ConfusionCounts& c, double beta = 2.0);

}  // namespace ppc
