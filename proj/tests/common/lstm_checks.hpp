#pragma once

// Gradient check and learnability task for the BiLSTM, shared by unit and
// acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "infodemic/lstm.hpp"
#include "infodemic/metrics.hpp"
#include "infodemic/random.hpp"

namespace lstmcheck {

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t parameters = 0;
};

// Central differences on every parameter; relative error is
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
inline GradCheck gradient_check(const infodemic::BiLstmModel& model, const infodemic::Sequence& seq,
                                infodemic::Label label, double h = 1e-5) {
  using namespace infodemic;
  const LossGradient lg = backward(model, seq, label);
  BiLstmModel probe = model;
  auto params = probe.parameters();
  const auto grads = lg.grad.parameters();
  GradCheck out;
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t i = 0; i < params[t].size(); ++i) {
      const double saved = params[t][i];
      params[t][i] = saved + h;
      const double up = cross_entropy(forward(probe, seq), label);
      params[t][i] = saved - h;
      const double down = cross_entropy(forward(probe, seq), label);
      params[t][i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = grads[t][i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      out.max_rel_error = std::max(out.max_rel_error, std::abs(analytic - numeric) / denom);
      ++out.parameters;
    }
  }
  return out;
}

// Random model, sequence and label drawn from `seed`, with dim <= 4 and
// sequence length <= 5.
inline GradCheck random_gradient_check(std::uint64_t seed) {
  using namespace infodemic;
  Rng rng(seed);
  const int dim_in = 1 + static_cast<int>(rng.uniform_index(4));
  const int dim_h = 1 + static_cast<int>(rng.uniform_index(4));
  const int len = 1 + static_cast<int>(rng.uniform_index(5));
  BiLstmModel model = BiLstmModel::initialize(dim_in, dim_h, rng.next_u64());
  // Nonzero biases so every gate term is exercised.
  for (auto p : model.parameters())
    for (auto& x : p) x += rng.uniform(-0.3, 0.3);
  Sequence seq(dim_in, len);
  for (int r = 0; r < dim_in; ++r)
    for (int c = 0; c < len; ++c) seq(r, c) = rng.uniform(-1.0, 1.0);
  const Label label = rng.uniform_index(2) ? Label::NotMisinformation : Label::Misinformation;
  return gradient_check(model, seq, label);
}

struct Learnability {
  double test_f1 = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

// Two disjoint 50-word vocabularies whose 16-dim embeddings live in
// orthogonal subspaces; a sequence's label is the vocabulary it draws from.
// 400 training and 100 test sequences, trained with `cfg`.
inline Learnability learnability(const infodemic::TrainConfig& cfg, std::uint64_t seed) {
  using namespace infodemic;
  constexpr int kDim = 16, kWords = 50;
  Rng rng(seed);
  std::vector<Eigen::VectorXd> vocab[2];
  for (int cls = 0; cls < 2; ++cls) {
    for (int w = 0; w < kWords; ++w) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(kDim);
      for (int d = 0; d < kDim / 2; ++d) v(cls * kDim / 2 + d) = rng.normal();
      vocab[cls].push_back(v.normalized());
    }
  }
  auto make = [&](std::size_t n) {
    std::vector<LabeledSequence> out;
    for (std::size_t i = 0; i < n; ++i) {
      const int cls = static_cast<int>(i % 2);
      const int len = 3 + static_cast<int>(rng.uniform_index(8));
      Sequence s(kDim, len);
      for (int t = 0; t < len; ++t) s.col(t) = vocab[cls][rng.uniform_index(kWords)];
      out.push_back({s, static_cast<Label>(cls)});
    }
    return out;
  };
  const auto train_set = make(400);
  const auto test_set = make(100);
  auto result = train(BiLstmModel::initialize(kDim, cfg.dim_h, cfg.seed), train_set, cfg);
  std::vector<Label> preds, golds;
  for (const auto& ex : test_set) {
    preds.push_back(predict(result.model, ex.sequence).label);
    golds.push_back(ex.label);
  }
  return {evaluate(preds, golds).f1, train_set.size(), test_set.size()};
}

}  // namespace lstmcheck
