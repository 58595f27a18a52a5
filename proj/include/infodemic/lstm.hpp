#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "infodemic/corpus.hpp"
#include "infodemic/embeddings.hpp"
#include "infodemic/preprocess.hpp"

namespace infodemic {

// Gate slots inside LstmCell arrays.
enum Gate : int { kInputGate = 0, kForgetGate = 1, kOutputGate = 2, kCandidate = 3 };

// One LSTM direction:
//   i = sigmoid(W_i x + U_i h + b_i)   f, o likewise
//   g = tanh(W_g x + U_g h + b_g)
//   c' = f * c + i * g,  h' = o * tanh(c')
struct LstmCell {
  std::array<Eigen::MatrixXd, 4> W;  // dim_h x dim_in
  std::array<Eigen::MatrixXd, 4> U;  // dim_h x dim_h
  std::array<Eigen::VectorXd, 4> b;  // dim_h

  static LstmCell zeros(int dim_in, int dim_h);
  int dim_in() const { return static_cast<int>(W[0].cols()); }
  int dim_h() const { return static_cast<int>(W[0].rows()); }
};

struct LstmState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;
};

// Throws std::invalid_argument on a shape mismatch.
LstmState lstm_step(const LstmCell& cell, const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                    const Eigen::VectorXd& c_prev);

// Bidirectional LSTM with a 2-way softmax over [h_forward_last ; h_backward_last].
// Also used as the gradient container (same shapes).
struct BiLstmModel {
  int dim_in = 0;
  int dim_h = 0;
  LstmCell forward_cell;
  LstmCell backward_cell;
  Eigen::MatrixXd W_out;  // 2 x 2*dim_h
  Eigen::VectorXd b_out;  // 2
  std::uint64_t seed = 0;

  static BiLstmModel zeros(int dim_in, int dim_h);
  // Weights uniform in +-1/sqrt(dim_h), biases zero except forget gates (+1).
  static BiLstmModel initialize(int dim_in, int dim_h, std::uint64_t seed);

  // Every trainable tensor, in the fixed serialization order.
  std::vector<std::span<double>> parameters();
  std::vector<std::span<const double>> parameters() const;
  std::size_t parameter_count() const;
};

struct NamedShape {
  std::string name;
  Eigen::Index rows;
  Eigen::Index cols;
};

// Names and shapes matching BiLstmModel::parameters() order.
std::vector<NamedShape> parameter_manifest(int dim_in, int dim_h);

// Columns are time steps; rows() must equal dim_in.
using Sequence = Eigen::MatrixXd;
using Probabilities = std::array<double, 2>;

// Softmax probabilities (p_misinformation, p_not). An empty sequence is
// treated as a single zero vector.
Probabilities forward(const BiLstmModel& model, const Sequence& sequence);

// -log(max(probs[label], 1e-12)).
double cross_entropy(const Probabilities& probs, Label label);

struct LossGradient {
  double loss = 0.0;
  Probabilities probs{};
  BiLstmModel grad;
};

// Backpropagation through time of cross_entropy(forward(model, seq), label).
LossGradient backward(const BiLstmModel& model, const Sequence& sequence, Label label);

enum class Optimizer { Sgd, Adam };

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 1e-3;
  Optimizer optimizer = Optimizer::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_seq_len = 50;
  std::uint64_t seed = 42;
  std::optional<double> clip_norm = 5.0;
  int dim_h = 64;

  // Throws ConfigError when a field is out of range.
  void validate() const;
};

struct LabeledSequence {
  Sequence sequence;
  Label label;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  std::optional<double> val_loss;
  std::optional<double> val_f1;
};

struct TrainResult {
  BiLstmModel model;
  std::vector<EpochLog> history;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mini-batch training; batch gradients are averaged, optionally clipped to
// cfg.clip_norm (global L2), then applied with SGD or Adam. Sample order is
// reshuffled each epoch from cfg.seed, so results are bit-reproducible.
// Throws TrainingDiverged on a non-finite loss.
TrainResult train(BiLstmModel model, std::span<const LabeledSequence> data, const TrainConfig& cfg,
                  std::span<const LabeledSequence> validation = {});

// Token -> embedding columns. Skip drops OOV tokens, Zero emits a zero
// column, Subword composes from buckets. Keeps the first max_seq_len
// vectors; an empty result becomes one zero column.
Sequence embed_sequence(const EmbeddingTable& table, std::span<const std::string> tokens, OovPolicy policy,
                        std::size_t max_seq_len);

struct Prediction {
  Label label;
  Probabilities probs;
};

// argmax of forward(); an exact 0.5/0.5 tie yields NotMisinformation.
Prediction predict(const BiLstmModel& model, const Sequence& sequence);
Prediction predict(const BiLstmModel& model, const EmbeddingTable& table, const ProcessedTweet& tweet,
                   OovPolicy policy, std::size_t max_seq_len);

// Binary container: 8-byte magic, little-endian u64 header length, JSON
// header (format version, dims, seed, tensor manifest), then every tensor
// as row-major little-endian float64.
void save_model(const BiLstmModel& model, const std::filesystem::path& path);
BiLstmModel load_model(const std::filesystem::path& path);

}  // namespace infodemic
