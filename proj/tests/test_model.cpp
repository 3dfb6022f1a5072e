#include <cmath>
#include <random>

#include "antnet/checkpoint.hpp"
#include "antnet/model.hpp"
#include "antnet/training.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace antnet;
using namespace antnet::testing;
using ad::Graph;
using ad::Tensor;

namespace {

std::vector<VariantSpec> all_variants() {
  std::vector<VariantSpec> out = VariantSpec::ablation_grid();
  out.push_back(VariantSpec::parse("bilstm-a"));
  out.push_back(VariantSpec::parse("bilstm-qa"));
  return out;
}

std::size_t scalar_count(const ParamStore& ps) {
  std::size_t n = 0;
  for (const auto& p : ps.all()) n += p.value.size();
  return n;
}

}  // namespace

TEST_CASE("variant names") {
  const auto grid = VariantSpec::ablation_grid();
  REQUIRE(grid.size() == 7);
  const char* names[] = {"antnet",       "antnet-sa",    "antnet-rr",   "antnet-mf",
                         "antnet-sa-rr", "antnet-sa-mf", "antnet-rr-mf"};
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(grid[i].name() == names[i]);
    CHECK(VariantSpec::parse(names[i]) == grid[i]);
  }
  CHECK(VariantSpec::parse("antnet-mf-sa") == VariantSpec::parse("antnet-sa-mf"));
  CHECK(VariantSpec::parse("antnet-sa-mf").display_name() == "AntNet-SA-MF");
  CHECK(VariantSpec::parse("bilstm-a").is_baseline());
  CHECK_THROWS(VariantSpec::parse("antnet-sa-rr-mf"));
  CHECK_THROWS(VariantSpec::parse("antnet-xx"));
  CHECK_THROWS(VariantSpec::parse("antnet-sa-sa"));
}

TEST_CASE("every variant builds and produces a distribution") {
  const auto batch = toy_batch(1, 4);
  const SkeletonCache cache = SkeletonCache::build(batch);
  for (const VariantSpec& v : all_variants()) {
    CAPTURE(v.name());
    Model m = Model::build(v, toy_hyper(), 3);
    for (const auto& s : batch) {
      Graph g;
      const Forward f = m.forward(g, s, cache.answers(s.question_id), 0.0);
      double total = 0.0;
      for (double p : f.probs.value().values()) total += p;
      CHECK(std::abs(total - 1.0) <= 1e-9);
      CHECK(f.features.cols() == m.classifier_dim());
    }
  }
}

TEST_CASE("ablations remove their parameters") {
  const Hyper h = toy_hyper();
  const Model full = Model::build(VariantSpec{}, h, 1);
  const Model no_sa = Model::build(VariantSpec::parse("antnet-sa"), h, 1);
  const Model no_rr = Model::build(VariantSpec::parse("antnet-rr"), h, 1);
  const Model no_sa_mf = Model::build(VariantSpec::parse("antnet-sa-mf"), h, 1);
  CHECK(full.params().contains("skeleton.w_s"));
  CHECK_FALSE(no_sa.params().contains("skeleton.w_s"));
  CHECK_FALSE(no_rr.params().contains("relevance.w_p"));
  CHECK_FALSE(no_rr.params().contains("relevance.b_p"));
  CHECK(scalar_count(no_sa_mf.params()) < scalar_count(full.params()));

  CHECK(full.memory_dim() == h.hidden_dim + h.ne);
  CHECK(no_rr.memory_dim() == h.hidden_dim);
  CHECK(full.classifier_dim() == 2 * h.hidden_dim);

  // Hop parameters: T hops × 2 stacks × per-hop shapes.
  std::size_t hop_scalars = 0;
  for (const auto& p : full.params().all())
    if (p.name.rfind("fusion.", 0) == 0) hop_scalars += p.value.size();
  CHECK(hop_scalars == h.hops * 2 * hop_param_count(h.hidden_dim, full.memory_dim(), h.resolved_hop_width()));
}

TEST_CASE("the −RR path feeds d-wide memory to fusion and trains") {
  const auto batch = toy_batch(2, 4);
  const SkeletonCache cache = SkeletonCache::build(batch);
  Model m = Model::build(VariantSpec::parse("antnet-rr"), toy_hyper(), 2);
  Graph g;
  const Forward f = m.forward(g, batch[0], cache.answers(batch[0].question_id), 0.0);
  CHECK(f.memory.cols() == toy_hyper().hidden_dim);
  TrainConfig cfg;
  cfg.max_epochs = 2;
  cfg.batch_size = 2;
  CHECK_NOTHROW(train(m, batch, batch, cache, cfg));
}

TEST_CASE("zero hops classify [v; u] directly") {
  const auto batch = toy_batch(3, 2);
  const SkeletonCache cache = SkeletonCache::build(batch);
  Hyper h = toy_hyper();
  h.hops = 0;
  Model m = Model::build(VariantSpec{}, h, 5);
  Graph g;
  const Forward f = m.forward(g, batch[0], cache.answers(batch[0].question_id), 0.0);
  const Tensor& joint = f.features.value();
  const Tensor& v = f.v.value();
  const Tensor& u = f.u.value();
  for (std::size_t c = 0; c < h.hidden_dim; ++c) {
    CHECK(joint[c] == v[c]);
    CHECK(joint[h.hidden_dim + c] == u[c]);
  }
}

TEST_CASE("full-model gradients pass a finite-difference check for every variant") {
  for (std::uint64_t seed : {1u, 2u}) {
    const auto batch = toy_batch(seed);
    const SkeletonCache cache = SkeletonCache::build(batch);
    for (bool frozen : {true, false}) {
      for (const VariantSpec& v : all_variants()) {
        CAPTURE(seed);
        CAPTURE(v.name());
        CAPTURE(frozen);
        Model m = toy::model(v, seed + 10, frozen);
        const GradCheckReport r = finite_diff_check(m.params(), batch_objective(m, batch, cache), toy::kEpsilon);
        CAPTURE(r.worst_param);
        CHECK(r.max_relative_error <= toy::kTolerance);
      }
    }
  }
}

TEST_CASE("Adam") {
  std::mt19937_64 rng(1);
  ParamStore ps;
  ParamId a = ps.add("a", uniform(3, 3, 1.0, rng));
  const Tensor before = ps[a].value;
  Adam adam{TrainConfig{}};
  for (int i = 0; i < 5; ++i) adam.step(ps);
  CHECK(ps[a].value == before);

  // A fresh optimizer's first step moves each coordinate by lr against the
  // gradient sign.
  Adam fresh{TrainConfig{}};
  ps[a].grad.fill(0.3);
  fresh.step(ps);
  for (std::size_t i = 0; i < 9; ++i)
    CHECK(ps[a].value[i] == doctest::Approx(before[i] - 5e-4).epsilon(1e-9));
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  const auto batch = toy_batch(4, 6);
  const SkeletonCache cache = SkeletonCache::build(batch);
  Model m = Model::build(VariantSpec{}, toy_hyper(), 4);
  const ParamStore before = m.params();
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.max_epochs = 3;
  cfg.batch_size = 2;
  cfg.patience = 0;
  CHECK_NOTHROW(cfg.validate());
  const TrainResult r = train(m, batch, batch, cache, cfg);
  CHECK(r.history.size() == 3);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(r.model.params()[ParamId{i}].value == before[ParamId{i}].value);
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.dropout = 1.0;
  CHECK_THROWS(cfg.validate());
  cfg = TrainConfig{};
  cfg.learning_rate = -1.0;
  CHECK_THROWS(cfg.validate());
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("evaluation metrics") {
  using L = Label;
  const std::vector<L> gold = {L::True, L::True, L::False, L::Uncertain};
  const EvalReport perfect = report_from_predictions(gold, gold);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.macro_f1 == 1.0);

  const std::vector<L> all_true(4, L::True);
  const EvalReport r = report_from_predictions(gold, all_true);
  CHECK(r.accuracy == 0.5);
  CHECK(r.f1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.f1[1] == 0.0);
  CHECK(r.f1[2] == 0.0);
  CHECK(r.macro_f1 == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
  CHECK(r.precision[0] == 0.5);
  CHECK(r.recall[0] == 1.0);

  // Row sums are gold counts and the trace over the total is the accuracy.
  std::size_t trace = 0;
  for (std::size_t g = 0; g < kNumLabels; ++g) {
    std::size_t row = 0;
    for (std::size_t p = 0; p < kNumLabels; ++p) row += r.confusion[g][p];
    CHECK(row == static_cast<std::size_t>(std::count(gold.begin(), gold.end(), kAllLabels[g])));
    trace += r.confusion[g][g];
  }
  CHECK(static_cast<double>(trace) / 4.0 == r.accuracy);
  CHECK(r.record().find("\"macro_f1\"") != std::string::npos);
}

TEST_CASE("evaluation is deterministic and rejects empty sets") {
  const auto batch = toy_batch(5, 6);
  const SkeletonCache cache = SkeletonCache::build(batch);
  Model m = Model::build(VariantSpec{}, toy_hyper(), 5);
  const EvalReport a = evaluate(m, batch, cache);
  const EvalReport b = evaluate(m, batch, cache);
  CHECK(a.record() == b.record());
  CHECK(a.mean_loss == b.mean_loss);
  CHECK_THROWS_AS(evaluate(m, {}, cache), DataError);
}

TEST_CASE("training is bit-identical for the same seed") {
  const auto batch = toy_batch(6, 8);
  const SkeletonCache cache = SkeletonCache::build(batch);
  TrainConfig cfg;
  cfg.max_epochs = 3;
  cfg.batch_size = 3;
  cfg.patience = 0;
  auto run = [&] { return train(Model::build(VariantSpec{}, toy_hyper(), 9), batch, batch, cache, cfg); };
  const TrainResult a = run();
  const TrainResult b = run();
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) CHECK(a.history[i].record() == b.history[i].record());
  for (std::size_t i = 0; i < a.model.params().size(); ++i)
    CHECK(a.model.params()[ParamId{i}].value == b.model.params()[ParamId{i}].value);
}

TEST_CASE("checkpoint round trip reproduces evaluation exactly") {
  const auto batch = toy_batch(7, 6);
  const SkeletonCache cache = SkeletonCache::build(batch);
  for (const VariantSpec& v : all_variants()) {
    CAPTURE(v.name());
    Checkpoint c;
    c.model = Model::build(v, toy_hyper(), 21);
    std::vector<std::string> tokens = {"<unk>"};
    for (std::size_t i = 1; i < toy_hyper().vocab_size; ++i) tokens.push_back("w" + std::to_string(i));
    c.vocab = Vocab(tokens);
    c.cache = cache;
    const std::string text = serialize_checkpoint(c);
    Checkpoint back = parse_checkpoint(text);
    CHECK(serialize_checkpoint(back) == text);
    CHECK(back.model.variant() == v);
    CHECK(evaluate(back.model, batch, back.cache).record() == evaluate(c.model, batch, cache).record());
    CHECK(evaluate(back.model, batch, back.cache).mean_loss == evaluate(c.model, batch, cache).mean_loss);
  }
  CHECK_THROWS_AS(parse_checkpoint("{}"), CheckpointError);
  CHECK_THROWS_AS(parse_checkpoint(R"({"format":"antnet-checkpoint","version":99})"), CheckpointError);
  CHECK_THROWS_AS(parse_checkpoint("not json"), CheckpointError);
}

TEST_CASE("skeleton cache and corpus preparation") {
  const auto samples = generate_synthetic(SyntheticConfig{});
  const PreparedCorpus data = prepare(split(samples, SplitSpec{}));
  CHECK_FALSE(data.train.empty());
  CHECK_FALSE(data.test.empty());
  // Every training question has its answers cached; test questions are unseen.
  for (const auto& s : data.train) CHECK_FALSE(data.cache.answers(s.question_id).empty());
  for (const auto& s : data.test) CHECK(data.cache.answers(s.question_id).empty());
  // The vocabulary covers the training split only.
  std::size_t unk_in_train = 0;
  for (const auto& s : data.train)
    for (std::size_t t : s.question) unk_in_train += t == Vocab::kUnk ? 1 : 0;
  CHECK(unk_in_train == 0);
}

TEST_CASE("sweep yields one row per value") {
  const auto samples = generate_synthetic(SyntheticConfig{.n_tf_questions = 4, .n_mc_questions = 4,
                                                          .answers_per_question = 3});
  const PreparedCorpus data = prepare(split(samples, SplitSpec{}));
  Hyper h = toy_hyper();
  TrainConfig cfg;
  cfg.max_epochs = 1;
  const std::size_t one[] = {2};
  CHECK(sweep(SweepParam::ne, one, VariantSpec{}, h, data, cfg).size() == 1);
  const std::size_t hops[] = {1, 2};
  const auto rows = sweep(SweepParam::hops, hops, VariantSpec{}, h, data, cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].value == 2);
  CHECK_THROWS(sweep(SweepParam::ne, std::span<const std::size_t>{}, VariantSpec{}, h, data, cfg));
}
