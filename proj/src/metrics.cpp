#include "infodemic/metrics.hpp"

#include <stdexcept>

namespace infodemic {

Confusion confusion_matrix(std::span<const Label> preds, std::span<const Label> golds) {
  if (preds.size() != golds.size()) throw std::invalid_argument("predictions and gold labels differ in length");
  Confusion m{};
  for (std::size_t i = 0; i < preds.size(); ++i) ++m[to_int(golds[i])][to_int(preds[i])];
  return m;
}

Metrics evaluate(std::span<const Label> preds, std::span<const Label> golds) {
  if (preds.size() != golds.size()) throw std::invalid_argument("predictions and gold labels differ in length");
  if (preds.empty()) throw std::invalid_argument("cannot evaluate an empty prediction set");
  Metrics out;
  out.confusion = confusion_matrix(preds, golds);
  const auto& m = out.confusion;
  const double total = static_cast<double>(preds.size());
  out.accuracy = static_cast<double>(m[0][0] + m[1][1]) / total;
  for (int c = 0; c < 2; ++c) {
    const double tp = static_cast<double>(m[c][c]);
    const double support = static_cast<double>(m[c][0] + m[c][1]);
    const double predicted = static_cast<double>(m[0][c] + m[1][c]);
    const double precision = predicted > 0 ? tp / predicted : 0.0;
    const double recall = support > 0 ? tp / support : 0.0;
    const double f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    const double weight = support / total;
    out.precision += weight * precision;
    out.recall += weight * recall;
    out.f1 += weight * f1;
  }
  return out;
}

}  // namespace infodemic
