#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <fstream>
#include <random>
#include <set>

#include "classifier/db.hpp"
#include "classifier/model_io.hpp"
#include "classifier/pairs.hpp"
#include "classifier/train.hpp"
#include "core/rng.hpp"

using namespace tubeloc;
using classifier::ArchConfig;
using classifier::EmbedModel;
using classifier::NetDims;
using classifier::PairSample;
using classifier::Raster;

namespace {

std::shared_ptr<Raster> random_raster(std::mt19937_64& rng, int size) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto r = std::make_shared<Raster>();
  r->size = size;
  r->v.resize(static_cast<std::size_t>(size) * size);
  for (double& x : r->v) x = u(rng);
  return r;
}

Image random_image(std::mt19937_64& rng, int w, int h) {
  std::uniform_int_distribution<int> u(0, 255);
  Image img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(u(rng));
  return img;
}

}  // namespace

TEST_CASE("contrastive loss matches the definition") {
  CHECK(classifier::contrastive_loss(0, 0.0, 1.0) == 0.0);
  CHECK(classifier::contrastive_loss(1, 1.0, 1.0) == 0.0);
  CHECK(classifier::contrastive_loss(1, 2.5, 1.0) == 0.0);
  CHECK(classifier::contrastive_loss(1, 0.4, 1.0) == doctest::Approx(0.18).epsilon(1e-12));
  CHECK(classifier::contrastive_loss(0, 0.4, 1.0) == doctest::Approx(0.08).epsilon(1e-12));
  // Continuity at d == margin.
  const double eps = 1e-9;
  CHECK(std::abs(classifier::contrastive_loss(1, 1.0 - eps, 1.0) -
                 classifier::contrastive_loss(1, 1.0 + eps, 1.0)) < 1e-12);
  CHECK_THROWS_AS(classifier::contrastive_loss(0, -0.1, 1.0), std::invalid_argument);
}

TEST_CASE("preprocess standardizes and guards constant images") {
  Image constant(40, 40);
  for (auto& p : constant.pixels) p = 137;
  const Raster zeroed = classifier::preprocess(constant, 32);
  for (double v : zeroed.v) CHECK(v == 0.0);

  auto rng = make_rng(21);
  const Image img = random_image(rng, 64, 64);
  const Raster r = classifier::preprocess(img, 64);
  double mean = 0, var = 0;
  for (double v : r.v) mean += v;
  mean /= static_cast<double>(r.v.size());
  for (double v : r.v) var += (v - mean) * (v - mean);
  var /= static_cast<double>(r.v.size());
  CHECK(std::abs(mean) < 1e-6);
  CHECK(std::abs(var - 1.0) < 1e-3);
}

TEST_CASE("embedding determinism and the zero-head case") {
  auto rng = make_rng(22);
  const ArchConfig arch{.input_size = 32, .c1 = 4, .c2 = 6, .c3 = 8, .embed_dim = 16};
  EmbedModel model = classifier::make_model(arch, 1.0, 7);
  const auto img = random_raster(rng, 32);
  const auto e1 = classifier::embed(model, *img);
  const auto e2 = classifier::embed(model, *img);
  CHECK(e1 == e2);

  // Zeroing the fully connected head forces a zero embedding for any input.
  const NetDims dims(arch);
  for (std::size_t i = dims.wf; i < dims.total; ++i) model.params[i] = 0.0;
  CHECK(classifier::embed(model, *img).norm() == 0.0);

  Raster wrong;
  wrong.size = 16;
  wrong.v.assign(256, 0.0);
  CHECK_THROWS_AS(classifier::embed(model, wrong), std::invalid_argument);
}

TEST_CASE("analytic gradients match central finite differences on a toy model") {
  const ArchConfig arch{.input_size = 16, .c1 = 2, .c2 = 3, .c3 = 4, .embed_dim = 8};
  EmbedModel model = classifier::make_model(arch, 1.0, 99);
  auto rng = make_rng(23);
  std::vector<PairSample> pairs;
  for (int i = 0; i < 10; ++i) {
    PairSample p;
    p.image_a = random_raster(rng, 16);
    p.image_b = random_raster(rng, 16);
    p.label = i % 2;
    pairs.push_back(std::move(p));
  }
  const NetDims dims(arch);
  std::vector<double> grad(dims.total);
  classifier::batch_loss_and_grad(model, pairs, grad);

  const double h = 1e-6;
  double worst = 0;
  for (std::size_t i = 0; i < dims.total; ++i) {
    const double saved = model.params[i];
    model.params[i] = saved + h;
    const double lp = classifier::mean_pair_loss(model, pairs);
    model.params[i] = saved - h;
    const double lm = classifier::mean_pair_loss(model, pairs);
    model.params[i] = saved;
    const double fd = (lp - lm) / (2 * h);
    const double rel = std::abs(grad[i] - fd) / std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
    worst = std::max(worst, rel);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("one small step on a batch reduces its loss") {
  const ArchConfig arch{.input_size = 16, .c1 = 2, .c2 = 3, .c3 = 4, .embed_dim = 8};
  EmbedModel model = classifier::make_model(arch, 1.0, 5);
  auto rng = make_rng(24);
  std::vector<PairSample> pairs;
  for (int i = 0; i < 2; ++i) {
    PairSample p;
    p.image_a = random_raster(rng, 16);
    p.image_b = random_raster(rng, 16);
    p.label = i;
    pairs.push_back(std::move(p));
  }
  classifier::TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 2;
  cfg.learning_rate = 1e-4;
  const double before = classifier::mean_pair_loss(model, pairs);
  classifier::train(model, pairs, cfg);
  const double after = classifier::mean_pair_loss(model, pairs);
  CHECK(after < before);
}

TEST_CASE("training is bit-deterministic for a fixed seed") {
  const ArchConfig arch{.input_size = 16, .c1 = 2, .c2 = 3, .c3 = 4, .embed_dim = 8};
  auto rng = make_rng(25);
  std::vector<PairSample> pairs;
  for (int i = 0; i < 12; ++i) {
    PairSample p;
    p.image_a = random_raster(rng, 16);
    p.image_b = random_raster(rng, 16);
    p.label = i % 2;
    pairs.push_back(std::move(p));
  }
  classifier::TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 4;
  cfg.seed = 31337;
  EmbedModel a = classifier::make_model(arch, 1.0, 42);
  EmbedModel b = classifier::make_model(arch, 1.0, 42);
  classifier::train(a, pairs, cfg);
  classifier::train(b, pairs, cfg);
  REQUIRE(a.params.size() == b.params.size());
  CHECK(std::memcmp(a.params.data(), b.params.data(), a.params.size() * sizeof(double)) == 0);
}

TEST_CASE("pair generation: combinatorics, balance, determinism, errors") {
  CHECK(classifier::positive_pair_pool_size(std::vector<int>(50, 52)) == 66300);
  CHECK(classifier::positive_pair_pool_size({2, 2}) == 2);

  auto rng = make_rng(26);
  std::vector<std::shared_ptr<const Raster>> images;
  for (int i = 0; i < 4; ++i) images.push_back(random_raster(rng, 8));
  const std::vector<int> zones = {0, 0, 1, 1};

  const auto pairs = classifier::generate_pairs(images, zones, 4, 77);
  REQUIRE(pairs.size() == 4);
  int positives = 0;
  std::set<std::pair<int, int>> seen;
  for (const auto& p : pairs) {
    CHECK(p.index_a < p.index_b);
    CHECK(seen.insert({p.index_a, p.index_b}).second);  // no duplicates in one call
    if (p.label == 0) {
      ++positives;
      CHECK(zones[p.index_a] == zones[p.index_b]);
    } else {
      CHECK(zones[p.index_a] != zones[p.index_b]);
    }
  }
  CHECK(positives == 2);

  const auto again = classifier::generate_pairs(images, zones, 4, 77);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(pairs[i].index_a == again[i].index_a);
    CHECK(pairs[i].index_b == again[i].index_b);
    CHECK(pairs[i].label == again[i].label);
  }

  CHECK_THROWS_AS(classifier::generate_pairs(images, {0, 0, 0, 1}, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(classifier::generate_pairs(images, zones, 3, 1), std::invalid_argument);
}

TEST_CASE("classification: self-query, single entry, permutation invariance") {
  const ArchConfig arch{.input_size = 16, .c1 = 2, .c2 = 3, .c3 = 4, .embed_dim = 8};
  const EmbedModel model = classifier::make_model(arch, 1.0, 9);
  auto rng = make_rng(27);
  std::vector<Image> images;
  std::vector<std::shared_ptr<const Raster>> rasters;
  for (int i = 0; i < 6; ++i) {
    images.push_back(random_image(rng, 16, 16));
    rasters.push_back(std::make_shared<Raster>(classifier::preprocess(images.back(), 16)));
  }
  const std::vector<int> zones = {0, 0, 1, 1, 2, 2};
  const auto db = classifier::build_db(model, rasters, zones);

  for (int i = 0; i < 6; ++i) {
    const auto res = classifier::classify(model, db, images[i]);
    CHECK(res.zone_id == zones[i]);
    CHECK(res.distance < 1e-9);
  }

  classifier::DescriptorDB single;
  single.entries.push_back(db.entries[4]);
  CHECK(classifier::classify(model, single, images[0]).zone_id == 2);

  classifier::DescriptorDB shuffled = db;
  std::shuffle(shuffled.entries.begin(), shuffled.entries.end(), rng);
  const Image probe = random_image(rng, 16, 16);
  CHECK(classifier::classify(model, db, probe).zone_id ==
        classifier::classify(model, shuffled, probe).zone_id);

  classifier::DescriptorDB empty;
  CHECK_THROWS_AS(classifier::classify(model, empty, probe), std::invalid_argument);
}

TEST_CASE("model and descriptor-db files round-trip") {
  const ArchConfig arch{.input_size = 16, .c1 = 2, .c2 = 3, .c3 = 4, .embed_dim = 8};
  const EmbedModel model = classifier::make_model(arch, 1.25, 4242);
  classifier::write_model("model_roundtrip.bin", model);
  const EmbedModel loaded = classifier::read_model("model_roundtrip.bin");
  CHECK(loaded.arch == model.arch);
  CHECK(loaded.margin == model.margin);
  CHECK(loaded.params == model.params);

  auto rng = make_rng(28);
  std::vector<std::shared_ptr<const Raster>> rasters;
  for (int i = 0; i < 3; ++i) rasters.push_back(random_raster(rng, 16));
  const auto db = classifier::build_db(model, rasters, {0, 1, 1});
  classifier::write_db("db_roundtrip.txt", db);
  const auto db2 = classifier::read_db("db_roundtrip.txt");
  REQUIRE(db2.entries.size() == db.entries.size());
  for (std::size_t i = 0; i < db.entries.size(); ++i) {
    CHECK(db2.entries[i].zone_id == db.entries[i].zone_id);
    CHECK(db2.entries[i].image_index == db.entries[i].image_index);
    CHECK((db2.entries[i].embedding - db.entries[i].embedding).cwiseAbs().maxCoeff() < 1e-8);
  }
  // write -> read -> write byte identity
  classifier::write_db("db_roundtrip2.txt", db2);
  std::ifstream f1("db_roundtrip.txt", std::ios::binary), f2("db_roundtrip2.txt", std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(b1 == b2);
  CHECK(!b1.empty());
}

TEST_CASE("non-finite loss aborts with a diagnostic") {
  const ArchConfig arch{.input_size = 16, .c1 = 2, .c2 = 3, .c3 = 4, .embed_dim = 8};
  EmbedModel model = classifier::make_model(arch, 1.0, 3);
  model.params[0] = std::numeric_limits<double>::quiet_NaN();
  auto rng = make_rng(29);
  std::vector<PairSample> pairs;
  PairSample p;
  p.image_a = random_raster(rng, 16);
  p.image_b = random_raster(rng, 16);
  p.label = 0;
  pairs.push_back(std::move(p));
  classifier::TrainConfig cfg;
  cfg.epochs = 1;
  CHECK_THROWS_AS(classifier::train(model, pairs, cfg), std::runtime_error);
}
