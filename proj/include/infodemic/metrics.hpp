#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "infodemic/corpus.hpp"

namespace infodemic {

// confusion[gold][pred], indexed by label value.
using Confusion = std::array<std::array<std::size_t, 2>, 2>;

struct Metrics {
  double accuracy = 0.0;
  // Support-weighted averages of the per-class values.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion confusion{};
};

Confusion confusion_matrix(std::span<const Label> preds, std::span<const Label> golds);

// Per-class precision/recall/F1 from the confusion matrix, averaged with
// weights equal to class support. A zero denominator contributes 0.
// Throws std::invalid_argument on empty or mismatched inputs.
Metrics evaluate(std::span<const Label> preds, std::span<const Label> golds);

}  // namespace infodemic
