#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "grad_check.hpp"
#include "lspp/classifier.hpp"

using namespace lspp;

namespace {

Standardizer unit_standardizer(int dim) {
  return Standardizer(VectorXd::Zero(dim), VectorXd::Ones(dim));
}

VaeModel tiny_vae(std::uint64_t seed = 50) {
  Rng rng(seed);
  return VaeModel(VaeArchitecture{2, 16}, unit_standardizer(kStateDim), rng);
}

CollisionClassifier tiny_classifier(std::uint64_t seed = 51) {
  Rng rng(seed);
  return CollisionClassifier(2, 16, unit_standardizer(4), rng);
}

Obstacle some_obstacle() { return Obstacle{0.4, -0.1, 0.5, 0.1}; }

}  // namespace

TEST_CASE("predict_collision_prob: zero-weight net answers one half") {
  CollisionClassifier c = tiny_classifier();
  for (auto& layer : c.mutable_net().layers()) {
    layer.weight.setZero();
    layer.bias.setZero();
  }
  Rng rng(52);
  CHECK(c.predict_collision_prob(rng.normal_vector(7), some_obstacle()) == 0.5);
}

TEST_CASE("predict_collision_prob: deterministic and clamped to (0,1)") {
  const CollisionClassifier c = tiny_classifier();
  Rng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const LatentVector z = 5.0 * rng.normal_vector(7);
    Obstacle o;
    o.x = rng.uniform(-1, 1);
    o.y = rng.uniform(-1, 1);
    o.h = rng.uniform(0.1, 0.9);
    o.r = rng.uniform(0.03, 0.2);
    const double p1 = c.predict_collision_prob(z, o);
    const double p2 = c.predict_collision_prob(z, o);
    CHECK(p1 == p2);
    CHECK(p1 >= CollisionClassifier::kProbClamp);
    CHECK(p1 <= 1.0 - CollisionClassifier::kProbClamp);
  }
}

TEST_CASE("bce_with_logit: ln 2 at the zero logit") {
  CHECK(bce_with_logit(0.0, 0.0) == doctest::Approx(0.69314718055994529).epsilon(1e-15));
  CHECK(bce_with_logit(0.0, 1.0) == doctest::Approx(0.69314718055994529).epsilon(1e-15));
  // stable at extreme logits
  CHECK(std::isfinite(bce_with_logit(500.0, 0.0)));
  CHECK(bce_with_logit(500.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("train_classifier: separates a two-sample dataset") {
  const VaeModel vae = tiny_vae();
  Rng rng(54);

  std::vector<LabeledCollisionSample> data(2);
  data[0].state.q = rng.normal_vector(7);
  data[0].state.e = rng.normal_vector(3);
  data[0].obstacle = Obstacle{0.5, 0.5, 0.5, 0.1};
  data[0].label = 1;
  data[1].state.q = rng.normal_vector(7);
  data[1].state.e = rng.normal_vector(3);
  data[1].obstacle = Obstacle{-0.5, -0.5, 0.2, 0.05};
  data[1].label = 0;

  ClassifierTrainConfig cfg;
  cfg.epochs = 400;
  cfg.learning_rate = 1e-2;
  cfg.hidden_layers = 2;
  cfg.hidden_units = 16;
  cfg.seed = 55;
  cfg.use_posterior_sample = false;  // two samples, no need for augmentation
  const CollisionClassifier c = train_classifier(vae, data, cfg);

  const ClassifierEvalReport report = evaluate_classifier(c, vae, data);
  CHECK(report.accuracy == 1.0);
  CHECK(report.balanced_accuracy == 1.0);
}

TEST_CASE("train_classifier: initial loss near ln 2 on balanced data") {
  const VaeModel vae = tiny_vae();
  Rng rng(56);
  std::vector<LabeledCollisionSample> data(64);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i].state.q = rng.normal_vector(7);
    data[i].state.e = rng.normal_vector(3);
    data[i].obstacle = Obstacle{rng.uniform(-1, 1), rng.uniform(-1, 1), 0.4, 0.1};
    data[i].label = i % 2;
  }
  // zero-weight net: evaluate BCE by hand at p = 0.5
  double loss = 0.0;
  for (const auto& s : data) loss += bce_with_logit(0.0, s.label);
  loss /= static_cast<double>(data.size());
  CHECK(loss == doctest::Approx(0.69314718055994529).epsilon(1e-12));
}

TEST_CASE("classifier gradients: BCE and logit backward match finite differences") {
  const CollisionClassifier c = tiny_classifier(57);
  const Obstacle o = some_obstacle();
  Rng rng(58);

  for (int rep = 0; rep < 10; ++rep) {
    const LatentVector z = rng.normal_vector(7);
    const double label = rep % 2;

    const auto lc = c.logit_with_cache(z, o);
    const double d_logit = sigmoid(lc.logit) - label;  // dBCE/dlogit
    const LatentVector grad = c.logit_backward(lc, d_logit);

    for (int i = 0; i < 7; ++i) {
      LatentVector zp = z, zm = z;
      zp[i] += 1e-6;
      zm[i] -= 1e-6;
      const double fd =
          (bce_with_logit(c.predict_logit(zp, o), label) -
           bce_with_logit(c.predict_logit(zm, o), label)) /
          2e-6;
      CHECK(gradcheck::relative_error(fd, grad[i]) < 1e-5);
    }
  }
}

TEST_CASE("classifier checkpoint: round trip") {
  const CollisionClassifier c = tiny_classifier(59);
  ClassifierTrainConfig cfg;
  cfg.seed = 59;
  const std::string path =
      (std::filesystem::temp_directory_path() / "lspp_clf_roundtrip.json").string();
  save_classifier(c, cfg, "deadbeef", path);
  const CollisionClassifier back = load_classifier(path);
  Rng rng(60);
  for (int i = 0; i < 10; ++i) {
    const LatentVector z = rng.normal_vector(7);
    CHECK(back.predict_logit(z, some_obstacle()) == c.predict_logit(z, some_obstacle()));
  }
  std::remove(path.c_str());
}
