#include "ppc/metrics.hpp"

#include "ppc/error.hpp"

namespace ppc {

MetricSet metrics(const ConfusionCounts& c, double beta) {
  if (!(beta > 0.0)) throw Error("beta must be positive");
  MetricSet m;
  m.beta = beta;
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  if (m.precision && m.recall) {
    const double p = *m.precision, r = *m.recall, b2 = beta * beta;
    const double den = b2 * p + r;
    if (den > 0.0) m.f_beta = (1.0 + b2) * p * r / den;
  }
  return m;
}

}  // namespace ppc
