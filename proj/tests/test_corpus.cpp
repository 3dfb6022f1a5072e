#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>

#include "antnet/corpus.hpp"
#include "antnet/vocab.hpp"
#include "doctest.h"

using namespace antnet;

namespace {

Sample make_sample(const std::string& qid, Tokens q, Tokens a, std::optional<Tokens> opt, Label l,
                   const std::string& aid = "a0") {
  Sample s;
  s.question_id = qid;
  s.question = std::move(q);
  s.answer_id = aid;
  s.answer = std::move(a);
  s.option = std::move(opt);
  s.label = l;
  return s;
}

std::string temp_path(const std::string& stem) {
  return (std::filesystem::temp_directory_path() / ("antnet_test_" + stem)).string();
}

Tokens numbered(const std::string& prefix, std::size_t n) {
  Tokens t;
  for (std::size_t i = 0; i < n; ++i) t.push_back(prefix + std::to_string(i));
  return t;
}

}  // namespace

TEST_CASE("labels serialize as lowercase strings") {
  CHECK(to_string(Label::True) == "true");
  CHECK(to_string(Label::False) == "false");
  CHECK(to_string(Label::Uncertain) == "uncertain");
  for (Label l : kAllLabels) CHECK(parse_label(to_string(l)) == l);
  CHECK_THROWS_AS(parse_label("maybe"), DataError);
}

TEST_CASE("load(save(samples)) is the identity") {
  const std::vector<Sample> samples = generate_synthetic(SyntheticConfig{});
  const std::string path = temp_path("roundtrip.jsonl");
  save_corpus(path, samples);
  const LoadedCorpus loaded = load_corpus(path);
  std::filesystem::remove(path);
  CHECK(loaded.samples == samples);
  CHECK(loaded.stats == compute_stats(samples));
}

TEST_CASE("empty corpus gives zeroed stats") {
  const LoadedCorpus c = parse_corpus("");
  CHECK(c.samples.empty());
  CHECK(c.stats == CorpusStats{});
  CHECK(parse_corpus("\n\n").samples.empty());
}

TEST_CASE("parse errors carry the line number") {
  const std::string good =
      R"({"question_id":"q1","question":["is","it"],"answer_id":"a1","answer":["yes"],"option":null,"label":"true"})";
  try {
    (void)parse_corpus(good + "\n{not json\n");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  const std::string bad_label =
      R"({"question_id":"q1","question":["is"],"answer_id":"a1","answer":["yes"],"option":null,"label":"perhaps"})";
  CHECK_THROWS_AS(parse_corpus(bad_label), DataError);
  const std::string empty_answer =
      R"({"question_id":"q1","question":["is"],"answer_id":"a1","answer":[],"option":null,"label":"true"})";
  CHECK_THROWS_AS(parse_corpus(empty_answer), DataError);
  const std::string option_missing =
      R"({"question_id":"q1","question":["a","or","b"],"answer_id":"a1","answer":["x"],"option":["c"],"label":"true"})";
  CHECK_THROWS_AS(parse_corpus(option_missing), DataError);
  CHECK_THROWS_AS(load_corpus(temp_path("does_not_exist.jsonl")), DataError);
}

TEST_CASE("stats") {
  std::vector<Sample> s = {
      make_sample("q1", {"a"}, {"x"}, std::nullopt, Label::True, "a1"),
      make_sample("q1", {"a"}, {"y"}, std::nullopt, Label::False, "a2"),
      make_sample("q2", {"b", "or", "c"}, {"b"}, Tokens{"b"}, Label::True, "a3"),
      make_sample("q2", {"b", "or", "c"}, {"b"}, Tokens{"c"}, Label::False, "a3"),
  };
  const CorpusStats st = compute_stats(s);
  CHECK(st.n_questions == 2);
  CHECK(st.n_answers == 3);
  CHECK(st.n_samples == 4);
  CHECK(st.per_label[0] + st.per_label[1] + st.per_label[2] == st.n_samples);
  CHECK(st.per_label[0] == 2);
  CHECK(stats_record(st).find("\"n_samples\":4") != std::string::npos);
  CHECK(format_stats_table(st).find("Uncertain") != std::string::npos);
}

TEST_CASE("split of 100 single-answer questions is 72/8/20") {
  std::vector<Sample> s;
  for (int i = 0; i < 100; ++i)
    s.push_back(make_sample("q" + std::to_string(i), {"w"}, {"x"}, std::nullopt, Label::True));
  for (auto g : {SplitGranularity::by_question, SplitGranularity::by_sample}) {
    SplitSpec spec;
    spec.granularity = g;
    const CorpusSplit parts = split(s, spec);
    CHECK(parts.train.size() == 72);
    CHECK(parts.validation.size() == 8);
    CHECK(parts.test.size() == 20);
  }
}

TEST_CASE("split is deterministic, disjoint and exhaustive") {
  const std::vector<Sample> s = generate_synthetic(SyntheticConfig{});
  SplitSpec spec;
  const CorpusSplit a = split(s, spec);
  const CorpusSplit b = split(s, spec);
  CHECK(a.train == b.train);
  CHECK(a.validation == b.validation);
  CHECK(a.test == b.test);
  CHECK(a.train.size() + a.validation.size() + a.test.size() == s.size());

  auto qids = [](const std::vector<Sample>& v) {
    std::set<std::string> out;
    for (const auto& x : v) out.insert(x.question_id);
    return out;
  };
  const auto tr = qids(a.train), va = qids(a.validation), te = qids(a.test);
  for (const auto& q : te) {
    CHECK(tr.count(q) == 0);
    CHECK(va.count(q) == 0);
  }
  for (const auto& q : va) CHECK(tr.count(q) == 0);

  spec.seed = 8;
  CHECK(split(s, spec).test != a.test);
}

TEST_CASE("split rejects too few questions and bad ratios") {
  std::vector<Sample> s = {make_sample("q1", {"w"}, {"x"}, std::nullopt, Label::True),
                           make_sample("q2", {"w"}, {"x"}, std::nullopt, Label::True)};
  CHECK_THROWS_AS(split(s, SplitSpec{}), DataError);
  s.push_back(make_sample("q3", {"w"}, {"x"}, std::nullopt, Label::True));
  CHECK_NOTHROW(split(s, SplitSpec{}));
  SplitSpec bad;
  bad.train_ratio = 1.0;
  CHECK_THROWS(split(s, bad));
}

TEST_CASE("synthetic corpus") {
  SyntheticConfig cfg;
  cfg.uncertain_prob = 0.0;
  for (const Sample& s : generate_synthetic(cfg)) CHECK(s.label != Label::Uncertain);

  SyntheticConfig mc;
  mc.n_tf_questions = 0;
  mc.n_mc_questions = 20;
  mc.answers_per_question = 8;
  mc.n_options_range = {2, 3};
  const auto samples = generate_synthetic(mc);
  CHECK(samples.size() >= 320);
  CHECK(samples.size() <= 480);
  for (const Sample& s : samples) {
    REQUIRE(s.option.has_value());
    for (const auto& tok : *s.option)
      CHECK(std::find(s.question.begin(), s.question.end(), tok) != s.question.end());
    CHECK_NOTHROW(validate(s));
  }

  const auto first = generate_synthetic(SyntheticConfig{});
  const auto second = generate_synthetic(SyntheticConfig{});
  CHECK(first == second);
  CHECK(fingerprint(first) == fingerprint(second));
  SyntheticConfig other;
  other.seed = 8;
  CHECK(fingerprint(generate_synthetic(other)) != fingerprint(first));

  const CorpusStats st = compute_stats(first);
  for (std::size_t c : st.per_label) CHECK(c > 0);

  SyntheticConfig tiny;
  tiny.vocab_size = 3;
  CHECK_THROWS_AS(generate_synthetic(tiny), DataError);
}

TEST_CASE("vocabulary") {
  const Vocab v = Vocab::build({make_sample("q", {"is", "it"}, {"yes", "it"}, std::nullopt, Label::True)});
  CHECK(v.size() == 4);
  CHECK(v.token(Vocab::kUnk) == "<unk>");
  CHECK(v.index("is") == 1);
  CHECK(v.index("unseen") == Vocab::kUnk);
  CHECK_THROWS(Vocab({"a", "<unk>"}));
}

TEST_CASE("truncation keeps the prefix") {
  const Sample s = make_sample("q", numbered("q", 5), numbered("a", 40), std::nullopt, Label::True);
  const Vocab v = Vocab::build({s});
  const IndexedSample ix = truncate_and_index(s, v);
  REQUIRE(ix.answer.size() == 33);
  for (std::size_t i = 0; i < 33; ++i) CHECK(v.token(ix.answer[i]) == "a" + std::to_string(i));
  CHECK(std::none_of(ix.answer.begin(), ix.answer.end(), [](std::size_t t) { return t == Vocab::kUnk; }));
  CHECK(std::none_of(ix.question.begin(), ix.question.end(), [](std::size_t t) { return t == Vocab::kUnk; }));
  CHECK(ix.indicator == std::vector<double>(5, 0.0));
  CHECK_FALSE(ix.is_mc);
}

TEST_CASE("option truncated away gives a zero indicator and a flag") {
  Tokens q = numbered("w", 36);
  q.push_back("red");
  q.push_back("or");
  q.push_back("blue");
  const Sample s = make_sample("q", q, {"red"}, Tokens{"red"}, Label::True);
  const IndexedSample ix = truncate_and_index(s, Vocab::build({s}));
  CHECK(ix.question.size() == 33);
  CHECK(ix.is_mc);
  CHECK(ix.option_truncated);
  CHECK(std::all_of(ix.indicator.begin(), ix.indicator.end(), [](double x) { return x == 0.0; }));
}

TEST_CASE("indicator sum equals option length for intact options") {
  const auto samples = generate_synthetic(SyntheticConfig{});
  const Vocab v = Vocab::build(samples);
  for (const Sample& s : samples) {
    const IndexedSample ix = truncate_and_index(s, v);
    CHECK(ix.indicator.size() == ix.question.size());
    double total = 0.0;
    for (double x : ix.indicator) total += x;
    if (s.option && !ix.option_truncated) {
      CHECK(total == static_cast<double>(s.option->size()));
    } else {
      CHECK(total == 0.0);
    }
  }
}

TEST_CASE("option positions") {
  const Tokens q = {"is", "new", "york", "or", "york", "new"};
  CHECK(option_positions(q, {"york", "new"}) == std::vector<std::size_t>{4, 5});
  CHECK(option_positions(q, {"new", "york"}) == std::vector<std::size_t>{1, 2});
  CHECK(option_positions(q, {"york", "is"}) == std::vector<std::size_t>{0, 2});
  CHECK(option_positions(q, {"boston"}).empty());
}
