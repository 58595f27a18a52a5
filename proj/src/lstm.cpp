#include "infodemic/lstm.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "infodemic/errors.hpp"
#include "infodemic/metrics.hpp"
#include "infodemic/random.hpp"

namespace infodemic {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr char kModelMagic[8] = {'I', 'D', 'B', 'L', 'S', 'T', 'M', '\n'};
constexpr int kModelFormatVersion = 1;
constexpr const char* kGateNames[4] = {"i", "f", "o", "g"};

VectorXd sigmoid(const VectorXd& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

VectorXd tanh_vec(const VectorXd& z) {
  return z.unaryExpr([](double v) { return std::tanh(v); });
}

Probabilities softmax2(const VectorXd& logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m), e1 = std::exp(logits[1] - m);
  const double s = e0 + e1;
  return {e0 / s, e1 / s};
}

void check_cell_shapes(const LstmCell& cell, Eigen::Index x, Eigen::Index h, Eigen::Index c) {
  if (x != cell.dim_in() || h != cell.dim_h() || c != cell.dim_h())
    throw std::invalid_argument("lstm_step: shape mismatch (x=" + std::to_string(x) + ", h=" + std::to_string(h) +
                                ", c=" + std::to_string(c) + "; cell expects " + std::to_string(cell.dim_in()) +
                                "/" + std::to_string(cell.dim_h()) + ")");
}

// Activations of one direction, kept for backpropagation.
// Index t+1 holds the state after consuming step t; index 0 is the zero start.
struct DirectionTrace {
  std::vector<std::array<VectorXd, 4>> gates;  // per step: i, f, o, g (post-activation)
  std::vector<VectorXd> h;
  std::vector<VectorXd> c;
};

void run_direction(const LstmCell& cell, const Sequence& seq, bool reverse, DirectionTrace& trace) {
  const Eigen::Index T = seq.cols();
  const int dh = cell.dim_h();
  trace.gates.resize(static_cast<std::size_t>(T));
  trace.h.assign(static_cast<std::size_t>(T + 1), VectorXd::Zero(dh));
  trace.c.assign(static_cast<std::size_t>(T + 1), VectorXd::Zero(dh));
  for (Eigen::Index s = 0; s < T; ++s) {
    const Eigen::Index t = reverse ? T - 1 - s : s;
    const auto idx = static_cast<std::size_t>(s);
    const VectorXd x = seq.col(t);
    const VectorXd& h_prev = trace.h[idx];
    auto& g = trace.gates[idx];
    for (int k = 0; k < 4; ++k) {
      VectorXd z = cell.W[k] * x + cell.U[k] * h_prev + cell.b[k];
      g[k] = k == kCandidate ? tanh_vec(z) : sigmoid(z);
    }
    trace.c[idx + 1] = g[kForgetGate].cwiseProduct(trace.c[idx]) + g[kInputGate].cwiseProduct(g[kCandidate]);
    trace.h[idx + 1] = g[kOutputGate].cwiseProduct(tanh_vec(trace.c[idx + 1]));
  }
}

// Accumulates parameter gradients for one direction given dL/dh at its final step.
void backprop_direction(const LstmCell& cell, const Sequence& seq, bool reverse, const DirectionTrace& trace,
                        const VectorXd& dh_last, LstmCell& grad) {
  const Eigen::Index T = seq.cols();
  VectorXd dh = dh_last;
  VectorXd dc = VectorXd::Zero(cell.dim_h());
  for (Eigen::Index s = T - 1; s >= 0; --s) {
    const Eigen::Index t = reverse ? T - 1 - s : s;
    const auto idx = static_cast<std::size_t>(s);
    const auto& g = trace.gates[idx];
    const VectorXd& c_prev = trace.c[idx];
    const VectorXd& h_prev = trace.h[idx];
    const VectorXd tanh_c = tanh_vec(trace.c[idx + 1]);

    dc += dh.cwiseProduct(g[kOutputGate]).cwiseProduct((1.0 - tanh_c.array().square()).matrix());
    std::array<VectorXd, 4> dz;
    dz[kOutputGate] = dh.cwiseProduct(tanh_c).cwiseProduct(
        g[kOutputGate].cwiseProduct((1.0 - g[kOutputGate].array()).matrix()));
    dz[kInputGate] =
        dc.cwiseProduct(g[kCandidate]).cwiseProduct(g[kInputGate].cwiseProduct((1.0 - g[kInputGate].array()).matrix()));
    dz[kForgetGate] =
        dc.cwiseProduct(c_prev).cwiseProduct(g[kForgetGate].cwiseProduct((1.0 - g[kForgetGate].array()).matrix()));
    dz[kCandidate] = dc.cwiseProduct(g[kInputGate]).cwiseProduct((1.0 - g[kCandidate].array().square()).matrix());

    const VectorXd x = seq.col(t);
    VectorXd dh_prev = VectorXd::Zero(cell.dim_h());
    for (int k = 0; k < 4; ++k) {
      grad.W[k].noalias() += dz[k] * x.transpose();
      grad.U[k].noalias() += dz[k] * h_prev.transpose();
      grad.b[k] += dz[k];
      dh_prev.noalias() += cell.U[k].transpose() * dz[k];
    }
    dc = dc.cwiseProduct(g[kForgetGate]);
    dh = dh_prev;
  }
}

const Sequence& nonempty(const BiLstmModel& model, const Sequence& seq, Sequence& storage) {
  if (seq.rows() != model.dim_in)
    throw std::invalid_argument("sequence has " + std::to_string(seq.rows()) + " features, model expects " +
                                std::to_string(model.dim_in));
  if (seq.cols() > 0) return seq;
  storage = Sequence::Zero(model.dim_in, 1);
  return storage;
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw DataError("model file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

void write_f64(std::ostream& out, double d) { write_u64(out, std::bit_cast<std::uint64_t>(d)); }
double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

}  // namespace

LstmCell LstmCell::zeros(int dim_in, int dim_h) {
  LstmCell cell;
  for (int k = 0; k < 4; ++k) {
    cell.W[k] = MatrixXd::Zero(dim_h, dim_in);
    cell.U[k] = MatrixXd::Zero(dim_h, dim_h);
    cell.b[k] = VectorXd::Zero(dim_h);
  }
  return cell;
}

LstmState lstm_step(const LstmCell& cell, const VectorXd& x, const VectorXd& h_prev, const VectorXd& c_prev) {
  check_cell_shapes(cell, x.size(), h_prev.size(), c_prev.size());
  std::array<VectorXd, 4> g;
  for (int k = 0; k < 4; ++k) {
    VectorXd z = cell.W[k] * x + cell.U[k] * h_prev + cell.b[k];
    g[k] = k == kCandidate ? tanh_vec(z) : sigmoid(z);
  }
  LstmState next;
  next.c = g[kForgetGate].cwiseProduct(c_prev) + g[kInputGate].cwiseProduct(g[kCandidate]);
  next.h = g[kOutputGate].cwiseProduct(tanh_vec(next.c));
  return next;
}

BiLstmModel BiLstmModel::zeros(int dim_in, int dim_h) {
  if (dim_in <= 0 || dim_h <= 0) throw std::invalid_argument("model dimensions must be positive");
  BiLstmModel m;
  m.dim_in = dim_in;
  m.dim_h = dim_h;
  m.forward_cell = LstmCell::zeros(dim_in, dim_h);
  m.backward_cell = LstmCell::zeros(dim_in, dim_h);
  m.W_out = MatrixXd::Zero(2, 2 * dim_h);
  m.b_out = VectorXd::Zero(2);
  return m;
}

BiLstmModel BiLstmModel::initialize(int dim_in, int dim_h, std::uint64_t seed) {
  BiLstmModel m = zeros(dim_in, dim_h);
  m.seed = seed;
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim_h));
  auto fill = [&](MatrixXd& mat) {
    // Row-major fill so the draw order does not depend on Eigen's storage order.
    for (Eigen::Index r = 0; r < mat.rows(); ++r)
      for (Eigen::Index c = 0; c < mat.cols(); ++c) mat(r, c) = rng.uniform(-bound, bound);
  };
  for (LstmCell* cell : {&m.forward_cell, &m.backward_cell}) {
    for (int k = 0; k < 4; ++k) {
      fill(cell->W[k]);
      fill(cell->U[k]);
    }
    cell->b[kForgetGate].setOnes();
  }
  fill(m.W_out);
  return m;
}

std::vector<std::span<double>> BiLstmModel::parameters() {
  std::vector<std::span<double>> out;
  auto add = [&](auto& t) { out.emplace_back(t.data(), static_cast<std::size_t>(t.size())); };
  for (LstmCell* cell : {&forward_cell, &backward_cell}) {
    for (int k = 0; k < 4; ++k) {
      add(cell->W[k]);
      add(cell->U[k]);
      add(cell->b[k]);
    }
  }
  add(W_out);
  add(b_out);
  return out;
}

std::vector<std::span<const double>> BiLstmModel::parameters() const {
  auto spans = const_cast<BiLstmModel*>(this)->parameters();
  return {spans.begin(), spans.end()};
}

std::size_t BiLstmModel::parameter_count() const {
  std::size_t n = 0;
  for (auto s : parameters()) n += s.size();
  return n;
}

std::vector<NamedShape> parameter_manifest(int dim_in, int dim_h) {
  std::vector<NamedShape> out;
  for (const char* dir : {"forward", "backward"}) {
    for (int k = 0; k < 4; ++k) {
      out.push_back({std::string(dir) + ".W_" + kGateNames[k], dim_h, dim_in});
      out.push_back({std::string(dir) + ".U_" + kGateNames[k], dim_h, dim_h});
      out.push_back({std::string(dir) + ".b_" + kGateNames[k], dim_h, 1});
    }
  }
  out.push_back({"output.W", 2, 2 * dim_h});
  out.push_back({"output.b", 2, 1});
  return out;
}

Probabilities forward(const BiLstmModel& model, const Sequence& sequence) {
  Sequence storage;
  const Sequence& seq = nonempty(model, sequence, storage);
  DirectionTrace fwd, bwd;
  run_direction(model.forward_cell, seq, false, fwd);
  run_direction(model.backward_cell, seq, true, bwd);
  VectorXd features(2 * model.dim_h);
  features << fwd.h.back(), bwd.h.back();
  return softmax2(model.W_out * features + model.b_out);
}

double cross_entropy(const Probabilities& probs, Label label) {
  return -std::log(std::max(probs[static_cast<std::size_t>(to_int(label))], 1e-12));
}

LossGradient backward(const BiLstmModel& model, const Sequence& sequence, Label label) {
  Sequence storage;
  const Sequence& seq = nonempty(model, sequence, storage);
  DirectionTrace fwd, bwd;
  run_direction(model.forward_cell, seq, false, fwd);
  run_direction(model.backward_cell, seq, true, bwd);
  VectorXd features(2 * model.dim_h);
  features << fwd.h.back(), bwd.h.back();

  LossGradient out;
  out.probs = softmax2(model.W_out * features + model.b_out);
  out.loss = cross_entropy(out.probs, label);
  out.grad = BiLstmModel::zeros(model.dim_in, model.dim_h);
  out.grad.seed = model.seed;

  const int y = to_int(label);
  VectorXd dlogits(2);
  dlogits << out.probs[0] - (y == 0 ? 1.0 : 0.0), out.probs[1] - (y == 1 ? 1.0 : 0.0);
  // Inside the clamp the loss is flat in p, so its gradient vanishes.
  if (out.probs[static_cast<std::size_t>(y)] < 1e-12) dlogits.setZero();

  out.grad.W_out = dlogits * features.transpose();
  out.grad.b_out = dlogits;
  const VectorXd dfeatures = model.W_out.transpose() * dlogits;
  backprop_direction(model.forward_cell, seq, false, fwd, dfeatures.head(model.dim_h), out.grad.forward_cell);
  backprop_direction(model.backward_cell, seq, true, bwd, dfeatures.tail(model.dim_h), out.grad.backward_cell);
  return out;
}

void TrainConfig::validate() const {
  if (epochs <= 0) throw ConfigError("epochs must be positive");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (max_seq_len <= 0) throw ConfigError("max_seq_len must be positive");
  if (dim_h <= 0) throw ConfigError("dim_h must be positive");
  if (clip_norm && !(*clip_norm > 0.0)) throw ConfigError("clip_norm must be positive when set");
  if (optimizer == Optimizer::Adam) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0))
      throw ConfigError("Adam requires 0 <= beta1, beta2 < 1 and epsilon > 0");
  }
}

TrainResult train(BiLstmModel model, std::span<const LabeledSequence> data, const TrainConfig& cfg,
                  std::span<const LabeledSequence> validation) {
  cfg.validate();
  if (data.empty()) throw std::invalid_argument("training set is empty");

  auto params = model.parameters();
  std::size_t n_params = 0;
  for (auto p : params) n_params += p.size();
  std::vector<double> grad_sum(n_params), adam_m(n_params, 0.0), adam_v(n_params, 0.0);
  std::uint64_t step = 0;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(cfg.seed, "train-order"));

  TrainResult result;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::fill(grad_sum.begin(), grad_sum.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const auto& sample = data[order[b]];
        LossGradient lg = backward(model, sample.sequence, sample.label);
        if (!std::isfinite(lg.loss)) {
          throw TrainingDiverged("training loss became non-finite in epoch " + std::to_string(epoch) +
                                 "; lower learning_rate or set clip_norm");
        }
        epoch_loss += lg.loss;
        std::size_t offset = 0;
        for (auto g : lg.grad.parameters()) {
          for (double v : g) grad_sum[offset++] += v;
        }
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      double norm_sq = 0.0;
      for (double& g : grad_sum) {
        g *= scale;
        norm_sq += g * g;
      }
      if (!std::isfinite(norm_sq))
        throw TrainingDiverged("non-finite gradient in epoch " + std::to_string(epoch) +
                               "; lower learning_rate or set clip_norm");
      if (cfg.clip_norm && norm_sq > *cfg.clip_norm * *cfg.clip_norm) {
        const double shrink = *cfg.clip_norm / std::sqrt(norm_sq);
        for (double& g : grad_sum) g *= shrink;
      }
      ++step;
      const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      std::size_t i = 0;
      for (auto p : params) {
        for (double& w : p) {
          const double g = grad_sum[i];
          if (cfg.optimizer == Optimizer::Sgd) {
            w -= cfg.learning_rate * g;
          } else {
            adam_m[i] = cfg.beta1 * adam_m[i] + (1.0 - cfg.beta1) * g;
            adam_v[i] = cfg.beta2 * adam_v[i] + (1.0 - cfg.beta2) * g * g;
            const double m_hat = adam_m[i] / bc1;
            const double v_hat = adam_v[i] / bc2;
            w -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
          }
          ++i;
        }
      }
    }
    EpochLog log;
    log.epoch = epoch;
    log.train_loss = epoch_loss / static_cast<double>(data.size());
    if (!validation.empty()) {
      double val_loss = 0.0;
      std::vector<Label> preds, golds;
      for (const auto& s : validation) {
        Prediction p = predict(model, s.sequence);
        val_loss += cross_entropy(p.probs, s.label);
        preds.push_back(p.label);
        golds.push_back(s.label);
      }
      log.val_loss = val_loss / static_cast<double>(validation.size());
      log.val_f1 = evaluate(preds, golds).f1;
    }
    result.history.push_back(log);
  }
  result.model = std::move(model);
  return result;
}

Sequence embed_sequence(const EmbeddingTable& table, std::span<const std::string> tokens, OovPolicy policy,
                        std::size_t max_seq_len) {
  if (policy == OovPolicy::Subword && !table.has_subwords())
    throw std::logic_error("Subword OOV policy requested but the embedding table has no subword buckets");
  std::vector<Vector> columns;
  for (const auto& t : tokens) {
    if (columns.size() >= max_seq_len) break;
    if (auto v = table.lookup(t)) {
      columns.emplace_back(v->begin(), v->end());
    } else if (policy == OovPolicy::Subword) {
      columns.push_back(subword_vector(table, t));
    } else if (policy == OovPolicy::Zero) {
      columns.emplace_back(table.dim(), 0.0);
    }
  }
  const auto dim = static_cast<Eigen::Index>(table.dim());
  if (columns.empty()) return Sequence::Zero(dim, 1);
  Sequence seq(dim, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (Eigen::Index r = 0; r < dim; ++r) seq(r, static_cast<Eigen::Index>(c)) = columns[c][static_cast<std::size_t>(r)];
  return seq;
}

Prediction predict(const BiLstmModel& model, const Sequence& sequence) {
  Probabilities p = forward(model, sequence);
  return {p[0] > p[1] ? Label::Misinformation : Label::NotMisinformation, p};
}

Prediction predict(const BiLstmModel& model, const EmbeddingTable& table, const ProcessedTweet& tweet,
                   OovPolicy policy, std::size_t max_seq_len) {
  return predict(model, embed_sequence(table, tweet.tokens, policy, max_seq_len));
}

void save_model(const BiLstmModel& model, const std::filesystem::path& path) {
  nlohmann::json header;
  header["format"] = "infodemic-bilstm";
  header["version"] = kModelFormatVersion;
  header["dim_in"] = model.dim_in;
  header["dim_h"] = model.dim_h;
  header["seed"] = model.seed;
  header["dtype"] = "float64";
  header["byte_order"] = "little";
  header["layout"] = "row-major";
  header["tensors"] = nlohmann::json::array();
  for (const auto& s : parameter_manifest(model.dim_in, model.dim_h))
    header["tensors"].push_back({{"name", s.name}, {"shape", {s.rows, s.cols}}});
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path.string());
  out.write(kModelMagic, sizeof kModelMagic);
  write_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  auto write_tensor = [&](const auto& t) {
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c) write_f64(out, t(r, c));
  };
  for (const LstmCell* cell : {&model.forward_cell, &model.backward_cell}) {
    for (int k = 0; k < 4; ++k) {
      write_tensor(cell->W[k]);
      write_tensor(cell->U[k]);
      write_tensor(cell->b[k]);
    }
  }
  write_tensor(model.W_out);
  write_tensor(model.b_out);
  if (!out) throw DataError("failed writing model file " + path.string());
}

BiLstmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingDependency("cannot open model file " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kModelMagic, 8) != 0)
    throw DataError(path.string() + " is not a BiLSTM model file");
  const std::uint64_t header_len = read_u64(in);
  if (header_len > (1u << 24)) throw DataError("model header length is implausible");
  std::string text(header_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) throw DataError("model file truncated");
  auto header = nlohmann::json::parse(text, nullptr, false);
  if (header.is_discarded() || header.value("format", "") != "infodemic-bilstm")
    throw DataError("model header is not valid JSON for format infodemic-bilstm");
  if (header.value("version", -1) != kModelFormatVersion)
    throw DataError("unsupported model format version " + header["version"].dump());
  const int dim_in = header.at("dim_in").get<int>();
  const int dim_h = header.at("dim_h").get<int>();
  const auto expected = parameter_manifest(dim_in, dim_h);
  const auto& tensors = header.at("tensors");
  if (tensors.size() != expected.size()) throw DataError("model tensor manifest has the wrong length");
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (tensors[i].at("name").get<std::string>() != expected[i].name ||
        tensors[i].at("shape").at(0).get<Eigen::Index>() != expected[i].rows ||
        tensors[i].at("shape").at(1).get<Eigen::Index>() != expected[i].cols)
      throw DataError("model tensor manifest mismatch at " + expected[i].name);
  }
  BiLstmModel model = BiLstmModel::zeros(dim_in, dim_h);
  model.seed = header.at("seed").get<std::uint64_t>();
  auto read_tensor = [&](auto& t) {
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = read_f64(in);
  };
  for (LstmCell* cell : {&model.forward_cell, &model.backward_cell}) {
    for (int k = 0; k < 4; ++k) {
      read_tensor(cell->W[k]);
      read_tensor(cell->U[k]);
      read_tensor(cell->b[k]);
    }
  }
  read_tensor(model.W_out);
  read_tensor(model.b_out);
  if (in.peek() != std::char_traits<char>::eof()) throw DataError("model file has trailing bytes");
  return model;
}

}  // namespace infodemic
