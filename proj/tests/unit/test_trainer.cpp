#include <cmath>
#include <sstream>

#include "doctest.h"
#include "s2cn/convae/autoencoder.hpp"
#include "s2cn/data/synthetic.hpp"
#include "s2cn/numkit/errors.hpp"
#include "s2cn/spectral/spectral.hpp"
#include "s2cn/trainer/checkpoint.hpp"
#include "s2cn/trainer/trainer.hpp"
#include "support/helpers.hpp"

using namespace s2cn;

TEST_CASE("presets carry the published tradeoffs") {
  const HyperParams y = preset("ExtendedYaleB", 10);
  CHECK(y.gamma1 == 1.0);
  CHECK(y.gamma2 == doctest::Approx(0.01));
  CHECK(y.gamma3 == 16.0);
  CHECK(y.gamma4 == 72.0);
  CHECK(y.t0 == 5);
  CHECK(y.t_max == 410);
  CHECK(preset("ExtendedYaleB", 38).t_max == 1530);
  const HyperParams o = preset("ORL", 40);
  CHECK(o.gamma1 == 0.1);
  CHECK(o.gamma2 == 0.01);
  CHECK(o.gamma3 == 8.0);
  CHECK(o.gamma4 == 1.2);
  CHECK(o.t_max == 940);
  const HyperParams c20 = preset("coil20", 20);
  CHECK(c20.gamma2 == 30.0);
  CHECK(c20.gamma4 == 6.0);
  CHECK(c20.t0 == 4);
  CHECK(c20.t_max == 80);
  const HyperParams c100 = preset("COIL100", 100);
  CHECK(c100.gamma4 == 7.0);
  CHECK(c100.t0 == 16);
  CHECK(c100.t_max == 110);
  CHECK(y.learning_rate == 1e-3);
  CHECK_THROWS_WITH_AS(preset("MNIST", 10), doctest::Contains("ExtendedYaleB"), std::invalid_argument);
}

TEST_CASE("preset networks") {
  CHECK(feature_dim(preset_network("ExtendedYaleB", 48, 42)) == 1080);
  const NetworkSpec orl = preset_network("ORL", 32, 32);
  CHECK(orl.encoder.size() == 3);
  CHECK(orl.encoder[2].channels == 5);
  CHECK(feature_dim(orl) == 80);
  CHECK(preset_network("COIL20", 32, 32).encoder[0].channels == 15);
  CHECK(preset_network("COIL100", 32, 32).encoder[0].kernel_h == 5);
  CHECK_THROWS_AS(preset_network("ORL", 48, 42), std::invalid_argument);
}

TEST_CASE("loss configurations switch the self-supervision terms") {
  HyperParams h = preset("ORL", 40);
  CHECK(with_loss_config(h, LossConfig::base).gamma3 == 0.0);
  CHECK(with_loss_config(h, LossConfig::base).gamma4 == 0.0);
  CHECK(with_loss_config(h, LossConfig::with_l3).gamma3 == 8.0);
  CHECK(with_loss_config(h, LossConfig::with_l3).gamma4 == 0.0);
  CHECK(with_loss_config(h, LossConfig::with_l4).gamma3 == 0.0);
  CHECK(with_loss_config(h, LossConfig::dual).gamma4 == 1.2);
  CHECK(parse_loss_config("+L3+L4") == LossConfig::dual);
  CHECK(parse_loss_config("+L3") == LossConfig::with_l3);
  CHECK_THROWS_AS(parse_loss_config("L5"), std::invalid_argument);
}

TEST_CASE("hyperparameter validation") {
  HyperParams h;
  CHECK_NOTHROW(h.validate());
  h.gamma3 = -1.0;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
  h = HyperParams{};
  h.tau = 1.5;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
  h = HyperParams{};
  h.t0 = 0;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
  HyperParams a, b;
  b.gamma2 = 2.0;
  CHECK(a.hash() == HyperParams{}.hash());
  CHECK(a.hash() != b.hash());
}

TEST_CASE("total loss") {
  HyperParams h;
  h.gamma1 = 2.0;
  h.gamma2 = 3.0;
  h.gamma3 = 4.0;
  h.gamma4 = 5.0;
  LossBreakdown p;
  p.l0 = 1.0;
  p.l1 = 1.0;
  p.l2 = 1.0;
  p.l3 = 1.0;
  p.l4 = 1.0;
  CHECK(total_loss(p, h) == 15.0);
  p.l3 = NAN;
  CHECK_THROWS_WITH_AS(total_loss(p, h), doctest::Contains("L3"), NumericError);
}

namespace {

struct Fixture {
  Model model;
  TrainData data;
  Supervision sup;
};

Fixture conv_fixture() {
  RngStream rng(11);
  Fixture f;
  NetworkSpec spec;
  spec.height = 8;
  spec.width = 8;
  spec.encoder = {{3, 3, 3}, {3, 3, 4}};
  f.data.images = th::random_tensor({6, 8, 8}, rng, 0.0, 1.0);
  f.data.clusters = 2;
  f.model.encoder = make_encoder(spec, rng);
  f.model.decoder = make_decoder(spec, rng);
  f.model.coefficients = th::random_tensor({6, 6}, rng, -0.3, 0.3);
  project_diag_zero(f.model.coefficients);
  f.model.head = make_head(feature_dim(spec), 6, 2, rng);
  f.sup.labels = {1, 2, 1, 2, 1, 2};
  f.sup.q = labels_to_q(f.sup.labels, 2).q;
  return f;
}

}  // namespace

TEST_CASE("combined gradient is the weighted sum of component gradients") {
  const Fixture f = conv_fixture();
  std::vector<std::vector<Tensor>> parts;
  for (int c = 0; c < 5; ++c) {
    ObjectiveOptions o;
    o.weights = {0, 0, 0, 0, 0};
    o.weights[static_cast<std::size_t>(c)] = 1.0;
    o.refresh_centers = false;
    parts.push_back(evaluate_objective(f.model, f.data, f.sup, o).grads);
  }
  ObjectiveOptions all;
  all.weights = {1.0, 0.5, 2.0, 3.0, 0.25};
  all.refresh_centers = false;
  const Evaluation ev = evaluate_objective(f.model, f.data, f.sup, all);
  const std::vector<Tensor> combined = combine_gradients(parts, all.weights);
  REQUIRE(combined.size() == ev.grads.size());
  for (std::size_t i = 0; i < combined.size(); ++i) CHECK(th::max_abs_diff(combined[i], ev.grads[i]) < 1e-10);
  HyperParams h;
  h.gamma1 = 0.5;
  h.gamma2 = 2.0;
  h.gamma3 = 3.0;
  h.gamma4 = 0.25;
  CHECK(total_loss(ev.parts, h) == doctest::Approx(ev.parts.total).epsilon(1e-14));
}

TEST_CASE("without self-expression the objective is the plain autoencoder") {
  const Fixture f = conv_fixture();
  ObjectiveOptions o;
  o.use_coefficients = false;
  const Evaluation ev = evaluate_objective(f.model, f.data, {}, o);
  const CaeGradient cae = cae_loss_and_gradient(f.data.images, f.model.encoder, f.model.decoder);
  CHECK(ev.parts.l0 == cae.loss);
  CHECK(ev.parts.l1 == 0.0);
  CHECK(ev.parts.l3 == 0.0);
}

TEST_CASE("the weighted norm is invariant to relabeling the segmentation") {
  const Fixture f = conv_fixture();
  const std::vector<Label> swapped{2, 1, 2, 1, 2, 1};
  const double a = q_weighted_norm(f.model.coefficients, f.sup.q).value;
  const double b = q_weighted_norm(f.model.coefficients, labels_to_q(swapped, 2).q).value;
  CHECK(a == b);
}

TEST_CASE("checkpoint round trip") {
  const auto dir = th::scratch_dir("checkpoint");
  const Fixture f = conv_fixture();
  save_model(dir / "m.s2cn", f.model);
  const Model back = load_model(dir / "m.s2cn");
  const auto names = parameter_names(f.model);
  CHECK(names == parameter_names(back));
  const auto a = parameter_values(f.model);
  const auto b = parameter_values(back);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(bitwise_equal(*a[i], *b[i]));
  CHECK(bitwise_equal(back.head.centers, f.model.head.centers));
  CHECK(back.decoder.layers.back().target == Extent{8, 8});
}

TEST_CASE("checkpoint format edge cases") {
  const auto dir = th::scratch_dir("checkpoint_edges");
  save_archive(dir / "empty.s2cn", {});
  CHECK(load_archive(dir / "empty.s2cn").empty());

  std::ostringstream os(std::ios::binary);
  write_archive(os, {{"self_expression.C", Tensor({2, 2}, 0.0)}});
  std::string bytes = os.str();
  {
    std::string bad = bytes;
    bad[1] = 'X';
    std::istringstream is(bad);
    CHECK_THROWS_WITH_AS(read_archive(is), doctest::Contains("magic"), FormatError);
  }
  {
    std::istringstream is(bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_WITH_AS(read_archive(is), doctest::Contains("self_expression.C"), FormatError);
  }
  std::istringstream ok(bytes);
  const Model m = model_from_archive(read_archive(ok));
  CHECK_FALSE(m.has_conv());
  CHECK(m.coefficients.shape() == Shape{2, 2});
}

namespace {

TrainData synthetic_features(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.subspaces = 3;
  spec.per_subspace = 15;
  spec.ambient = 12;
  spec.dim = 2;
  spec.seed = seed;
  return make_train_data(to_pseudo_images(gen_synthetic(spec)), true);
}

HyperParams quick_hyper() {
  HyperParams h = preset("synthetic", 3);
  h.dsc_epochs = 100;
  h.t_max = 2;
  h.t0 = 3;
  h.seed = 4;
  return h;
}

}  // namespace

TEST_CASE("training on raw features records every stage") {
  const TrainData data = synthetic_features(1);
  TrainOptions opt;
  opt.use_features = true;
  const TrainResult r = train(data, quick_hyper(), opt);
  CHECK(r.history.rows.size() == 100 + 2 * 3);
  CHECK(r.history.updates.size() == 3);
  std::size_t with_error = 0;
  for (const HistoryRow& row : r.history.rows) with_error += row.error_percent.has_value();
  CHECK(with_error == 2);
  CHECK(r.history.rows[99].stage == Stage::dsc);
  CHECK(r.history.rows[100].stage == Stage::full);
  CHECK(r.history.rows.back().loss.epoch == 106);
  CHECK(r.labels.size() == 45);
  for (std::size_t i = 0; i < 45; ++i) CHECK(r.model.coefficients(i, i) == 0.0);
  CHECK_FALSE(r.model.has_conv());
  CHECK(r.model.has_head());
}

TEST_CASE("training is deterministic for a fixed seed") {
  const TrainData data = synthetic_features(2);
  TrainOptions opt;
  opt.use_features = true;
  const TrainResult a = train(data, quick_hyper(), opt);
  const TrainResult b = train(data, quick_hyper(), opt);
  CHECK(a.labels.labels == b.labels.labels);
  CHECK(bitwise_equal(a.model.coefficients, b.model.coefficients));
  REQUIRE(a.history.rows.size() == b.history.rows.size());
  for (std::size_t i = 0; i < a.history.rows.size(); ++i) CHECK(a.history.rows[i].loss.total == b.history.rows[i].loss.total);
}

TEST_CASE("base configuration leaves the head untouched") {
  const TrainData data = synthetic_features(3);
  TrainOptions opt;
  opt.use_features = true;
  const HyperParams h = with_loss_config(quick_hyper(), LossConfig::base);
  const TrainResult r = train(data, h, opt);
  RngStream rng(derive_seed(h.seed, "head"));
  const ClassifierHead fresh = make_head(12, 45, 3, rng);
  CHECK(bitwise_equal(fresh.w1, r.model.head.w1));
  CHECK(bitwise_equal(fresh.w3, r.model.head.w3));
}

TEST_CASE("divergence aborts with the partial history") {
  const TrainData data = synthetic_features(4);
  TrainOptions opt;
  opt.use_features = true;
  HyperParams h = quick_hyper();
  h.learning_rate = 1e200;
  h.gamma2 = 1e200;
  try {
    train(data, h, opt);
    FAIL("expected TrainingAborted");
  } catch (const TrainingAborted& e) {
    CHECK_FALSE(e.partial().history.rows.empty());
  }
}

TEST_CASE("training preconditions") {
  TrainData data = synthetic_features(5);
  TrainOptions opt;
  opt.use_features = true;
  data.clusters = 1;
  CHECK_THROWS_AS(train(data, quick_hyper(), opt), std::invalid_argument);
  data.clusters = 3;
  opt.use_features = false;
  CHECK_THROWS_AS(train(data, quick_hyper(), opt), std::invalid_argument);
}

TEST_CASE("convolutional run without pretraining needs a model") {
  SyntheticSpec spec;
  spec.subspaces = 2;
  spec.per_subspace = 5;
  spec.ambient = 16;
  const TrainData data = make_train_data(to_pseudo_images(gen_synthetic(spec)), false);
  TrainOptions opt;
  opt.network = preset_network("synthetic", 4, 4);
  opt.stages = {false, true, true};
  CHECK_THROWS_AS(train(data, quick_hyper(), opt), std::invalid_argument);
  opt.stages = {true, false, false};
  HyperParams h = quick_hyper();
  h.cae_epochs = 20;
  const TrainResult pre = train(data, h, opt);
  CHECK(pre.history.rows.size() == 20);
  CHECK(pre.history.rows.front().loss.l0 > pre.history.rows.back().loss.l0);
  opt.stages = {false, true, true};
  const TrainResult rest = train(data, h, opt, pre.model);
  CHECK(rest.history.rows.front().stage == Stage::dsc);
  CHECK(rest.labels.size() == 10);
}
