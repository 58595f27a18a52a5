#include <doctest.h>

#include <cmath>

#include "infodemic/errors.hpp"
#include "infodemic/lstm.hpp"
#include "lstm_checks.hpp"
#include "support.hpp"

using namespace infodemic;

namespace {

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

BiLstmModel noisy_model(int dim_in, int dim_h, std::uint64_t seed) {
  auto m = BiLstmModel::initialize(dim_in, dim_h, seed);
  Rng rng(seed + 1);
  for (auto p : m.parameters())
    for (auto& x : p) x += rng.uniform(-0.2, 0.2);
  return m;
}

Sequence random_sequence(int dim, int len, Rng& rng) {
  Sequence s(dim, len);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < len; ++c) s(r, c) = rng.normal();
  return s;
}

}  // namespace

TEST_CASE("scalar cell step by hand") {
  LstmCell cell = LstmCell::zeros(1, 1);
  const double w[4] = {0.5, -0.3, 0.8, 1.2}, u[4] = {0.1, 0.2, -0.4, 0.3}, b[4] = {0.0, 1.0, 0.1, -0.2};
  for (int k = 0; k < 4; ++k) {
    cell.W[k](0, 0) = w[k];
    cell.U[k](0, 0) = u[k];
    cell.b[k](0) = b[k];
  }
  const double x = 0.7, h = -0.5, c = 0.25;
  const double i = sig(w[0] * x + u[0] * h + b[0]);
  const double f = sig(w[1] * x + u[1] * h + b[1]);
  const double o = sig(w[2] * x + u[2] * h + b[2]);
  const double g = std::tanh(w[3] * x + u[3] * h + b[3]);
  const double c2 = f * c + i * g, h2 = o * std::tanh(c2);
  auto next = lstm_step(cell, Eigen::VectorXd::Constant(1, x), Eigen::VectorXd::Constant(1, h),
                        Eigen::VectorXd::Constant(1, c));
  CHECK(next.c(0) == doctest::Approx(c2).epsilon(1e-14));
  CHECK(next.h(0) == doctest::Approx(h2).epsilon(1e-14));
  CHECK_THROWS_AS(lstm_step(cell, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)),
                  std::invalid_argument);
}

TEST_CASE("forward equals two step-wise passes and a softmax") {
  Rng rng(31);
  const auto m = noisy_model(3, 4, 9);
  const auto seq = random_sequence(3, 6, rng);
  Eigen::VectorXd hf = Eigen::VectorXd::Zero(4), cf = hf, hb = hf, cb = hf;
  for (int t = 0; t < 6; ++t) {
    auto s = lstm_step(m.forward_cell, seq.col(t), hf, cf);
    hf = s.h;
    cf = s.c;
  }
  for (int t = 5; t >= 0; --t) {
    auto s = lstm_step(m.backward_cell, seq.col(t), hb, cb);
    hb = s.h;
    cb = s.c;
  }
  Eigen::VectorXd z(8);
  z << hf, hb;
  Eigen::VectorXd logits = m.W_out * z + m.b_out;
  const double p0 = 1.0 / (1.0 + std::exp(logits(1) - logits(0)));
  auto p = forward(m, seq);
  CHECK(p[0] == doctest::Approx(p0).epsilon(1e-12));
  CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cross_entropy(p, Label::NotMisinformation) == doctest::Approx(-std::log(p[1])));
}

TEST_CASE("initialization") {
  auto m = BiLstmModel::initialize(5, 8, 3);
  auto again = BiLstmModel::initialize(5, 8, 3);
  const double bound = 1.0 / std::sqrt(8.0);
  for (int k = 0; k < 4; ++k) {
    CHECK(m.forward_cell.W[k].cwiseAbs().maxCoeff() <= bound);
    CHECK(m.forward_cell.b[k].isConstant(k == kForgetGate ? 1.0 : 0.0));
    CHECK(m.backward_cell.b[k].isConstant(k == kForgetGate ? 1.0 : 0.0));
    CHECK(m.forward_cell.W[k] == again.forward_cell.W[k]);
  }
  CHECK(m.parameter_count() == 2 * 4 * (8 * 5 + 8 * 8 + 8) + 2 * 16 + 2);
  auto names = parameter_manifest(5, 8);
  auto params = m.parameters();
  REQUIRE(names.size() == params.size());
  for (std::size_t i = 0; i < names.size(); ++i)
    CHECK(static_cast<std::size_t>(names[i].rows * names[i].cols) == params[i].size());
}

TEST_CASE("gradients match central differences") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto gc = lstmcheck::random_gradient_check(seed);
    CAPTURE(seed);
    CHECK(gc.max_rel_error < 1e-4);
  }
  // Empty sequence takes the zero-vector path.
  auto m = noisy_model(2, 3, 4);
  CHECK(lstmcheck::gradient_check(m, Sequence(2, 0), Label::Misinformation).max_rel_error < 1e-4);
}

TEST_CASE("save and load round trip bit-exactly") {
  auto dir = testsupport::scratch("lstm-io");
  auto m = noisy_model(4, 3, 77);
  m.seed = 77;
  save_model(m, dir / "m.bin");
  auto back = load_model(dir / "m.bin");
  CHECK(back.dim_in == 4);
  CHECK(back.dim_h == 3);
  CHECK(back.seed == 77);
  auto a = m.parameters();
  auto b = back.parameters();
  for (std::size_t t = 0; t < a.size(); ++t)
    for (std::size_t i = 0; i < a[t].size(); ++i) CHECK(a[t][i] == b[t][i]);

  auto bytes = testsupport::read_text(dir / "m.bin");
  testsupport::write_text(dir / "cut.bin", bytes.substr(0, bytes.size() - 8));
  CHECK_THROWS_AS(load_model(dir / "cut.bin"), DataError);
  testsupport::write_text(dir / "junk.bin", "not a model at all");
  CHECK_THROWS_AS(load_model(dir / "junk.bin"), DataError);
}

TEST_CASE("training config validation") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.epochs = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = TrainConfig{};
  c.learning_rate = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = TrainConfig{};
  c.beta2 = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("training is reproducible and reduces loss") {
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.dim_h = 6;
  cfg.batch_size = 8;
  cfg.learning_rate = 0.01;
  Rng rng(3);
  std::vector<LabeledSequence> data;
  for (int i = 0; i < 40; ++i) {
    Sequence s = random_sequence(3, 4, rng);
    const Label l = s.row(0).sum() > 0 ? Label::Misinformation : Label::NotMisinformation;
    data.push_back({s, l});
  }
  auto a = train(BiLstmModel::initialize(3, 6, 42), data, cfg);
  auto b = train(BiLstmModel::initialize(3, 6, 42), data, cfg);
  REQUIRE(a.history.size() == 4);
  CHECK(a.history.back().train_loss < a.history.front().train_loss);
  auto pa = a.model.parameters();
  auto pb = b.model.parameters();
  for (std::size_t t = 0; t < pa.size(); ++t)
    for (std::size_t i = 0; i < pa[t].size(); ++i) REQUIRE(pa[t][i] == pb[t][i]);
}

TEST_CASE("separable vocabularies are learned") {
  TrainConfig cfg;
  cfg.epochs = 8;
  cfg.dim_h = 16;
  cfg.learning_rate = 0.01;
  CHECK(lstmcheck::learnability(cfg, 11).test_f1 >= 0.95);
}

TEST_CASE("embed_sequence") {
  EmbeddingTable t(2);
  t.set("a", std::vector<double>{1, 2});
  std::vector<std::string> toks = {"a", "zz", "a", "a"};
  auto s = embed_sequence(t, toks, OovPolicy::Skip, 2);
  CHECK(s.cols() == 2);
  CHECK(embed_sequence(t, toks, OovPolicy::Zero, 10).cols() == 4);
  CHECK(embed_sequence(t, toks, OovPolicy::Zero, 10)(1, 1) == 0.0);
  std::vector<std::string> none = {"q"};
  auto e = embed_sequence(t, none, OovPolicy::Skip, 10);
  CHECK(e.cols() == 1);
  CHECK(e.isZero());
  CHECK_THROWS_AS(embed_sequence(t, toks, OovPolicy::Subword, 10), std::logic_error);
}
