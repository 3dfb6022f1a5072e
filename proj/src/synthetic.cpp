#include <algorithm>
#include <random>
#include <set>

#include "antnet/corpus.hpp"

namespace antnet {

namespace {

const std::vector<std::string> kChatter = {"weather", "lunch", "traffic", "today",  "phone",
                                           "music",   "movie", "tired",   "busy",   "weekend",
                                           "coffee",  "friend", "rain",   "game",   "work",
                                           "late"};

class Generator {
 public:
  explicit Generator(const SyntheticConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    for (std::size_t i = 0; i < cfg.vocab_size; ++i) content_.push_back("c" + std::to_string(i));
  }

  std::vector<Sample> run() {
    std::vector<Sample> out;
    for (std::size_t i = 0; i < cfg_.n_tf_questions; ++i) tf_question(i, out);
    for (std::size_t i = 0; i < cfg_.n_mc_questions; ++i) mc_question(i, out);
    return out;
  }

 private:
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  template <class T>
  const T& choose(const std::vector<T>& v) { return v[pick(v.size())]; }

  static void append(Tokens& dst, const Tokens& src) { dst.insert(dst.end(), src.begin(), src.end()); }

  /// Distinct content words not in `exclude`.
  Tokens draw_content(std::size_t n, const std::set<std::string>& exclude) {
    std::vector<std::string> pool;
    for (const auto& w : content_)
      if (!exclude.count(w)) pool.push_back(w);
    std::shuffle(pool.begin(), pool.end(), rng_);
    pool.resize(std::min(n, pool.size()));
    return pool;
  }

  Tokens chatter_span(const std::set<std::string>& protect) {
    const std::size_t len = 2 + pick(3);
    Tokens span;
    for (std::size_t k = 0; k < len; ++k) {
      if (coin(0.5)) {
        span.push_back(choose(kChatter));
      } else {
        Tokens w = draw_content(1, protect);
        span.push_back(w.empty() ? choose(kChatter) : w.front());
      }
    }
    return span;
  }

  /// Irrelevant span placed before or after the core answer.
  Tokens add_noise(Tokens core, const std::set<std::string>& protect) {
    if (!coin(cfg_.irrelevant_span_prob)) return core;
    Tokens span = chatter_span(protect);
    if (coin(0.5)) {
      append(span, core);
      return span;
    }
    append(core, span);
    return core;
  }

  void tf_question(std::size_t qi, std::vector<Sample>& out) {
    const Tokens topic = draw_content(coin(0.7) ? 1 : 2, {});
    Tokens q;
    if (coin(0.3)) append(q, coin(0.5) ? Tokens{"by", "the", "way"} : Tokens{"just", "curious"});
    switch (pick(4)) {
      case 0: append(q, {"do", "you", "like"}); append(q, topic); break;
      case 1: append(q, {"would", "you", "want"}); append(q, topic); break;
      case 2: append(q, {"are", "you", "interested", "in"}); append(q, topic); break;
      default: q.push_back("is"); append(q, topic); append(q, {"important", "to", "you"}); break;
    }
    q.push_back("?");
    const std::set<std::string> protect(topic.begin(), topic.end());

    for (std::size_t j = 0; j < cfg_.answers_per_question; ++j) {
      Label label;
      Tokens core;
      if (coin(cfg_.uncertain_prob)) {
        label = Label::Uncertain;
        switch (pick(5)) {
          case 0: core = {"maybe"}; break;
          case 1: core = {"not", "sure"}; break;
          case 2: core = {"it", "depends"}; break;
          case 3: core = {"hard", "to", "say"}; break;
          default: core = chatter_span(protect); break;
        }
      } else if (coin(0.5)) {
        label = Label::True;
        switch (pick(6)) {
          case 0: core = {"yes"}; break;
          case 1: core = {"sure"}; break;
          case 2: core = {"yes", "i", "do"}; break;
          case 3: core = {"of", "course"}; break;
          case 4: core = {"i", "like"}; append(core, topic); break;
          default: core = {"definitely"}; break;
        }
      } else {
        label = Label::False;
        switch (pick(6)) {
          case 0: core = {"no"}; break;
          case 1: core = {"not", "really"}; break;
          case 2: core = {"no", "i", "don't"}; break;
          case 3: core = {"never"}; break;
          case 4: core = {"i", "hate"}; append(core, topic); break;
          default: core = {"not", "at", "all"}; break;
        }
      }
      Sample s;
      s.question_id = "tf" + std::to_string(qi);
      s.question = q;
      s.answer_id = "a" + std::to_string(j);
      s.answer = add_noise(std::move(core), protect);
      s.label = label;
      out.push_back(std::move(s));
    }
  }

  void mc_question(std::size_t qi, std::vector<Sample>& out) {
    const auto [lo, hi] = cfg_.n_options_range;
    const std::size_t k = lo + pick(hi - lo + 1);
    std::vector<Tokens> options;
    std::set<std::string> used;
    for (std::size_t o = 0; o < k; ++o) {
      Tokens opt = draw_content(coin(0.75) ? 1 : 2, used);
      if (opt.empty()) opt = draw_content(1, used);
      used.insert(opt.begin(), opt.end());
      options.push_back(std::move(opt));
    }

    Tokens q;
    if (coin(0.3)) append(q, {"just", "curious"});
    switch (pick(3)) {
      case 0: append(q, {"which", "do", "you", "prefer"}); break;
      case 1: append(q, {"do", "you", "like"}); break;
      default: append(q, {"would", "you", "choose"}); break;
    }
    for (std::size_t o = 0; o < k; ++o) {
      if (o > 0) q.push_back("or");
      append(q, options[o]);
    }
    q.push_back("?");

    for (std::size_t j = 0; j < cfg_.answers_per_question; ++j) {
      std::vector<Label> labels(k);
      Tokens core;
      if (coin(cfg_.uncertain_prob)) {
        std::fill(labels.begin(), labels.end(), Label::Uncertain);
        switch (pick(4)) {
          case 0: core = {"maybe"}; break;
          case 1: core = {"not", "sure"}; break;
          case 2: core = {"hard", "to", "say"}; break;
          default: core = chatter_span(used); break;
        }
      } else {
        const double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
        if (r < 0.5) {
          const std::size_t a = pick(k);
          for (std::size_t o = 0; o < k; ++o) labels[o] = o == a ? Label::True : Label::False;
          switch (pick(4)) {
            case 0: core = {"i", "prefer"}; append(core, options[a]); break;
            case 1: core = options[a]; break;
            case 2: core = {"i", "like"}; append(core, options[a]); break;
            default: core = options[a]; core.push_back("please"); break;
          }
        } else if (r < 0.7) {
          std::fill(labels.begin(), labels.end(), Label::True);
          core = k == 2 && coin(0.5) ? Tokens{"both"} : Tokens{"all", "of", "them"};
        } else {
          std::fill(labels.begin(), labels.end(), Label::False);
          core = k == 2 && coin(0.5) ? Tokens{"neither"} : Tokens{"none", "of", "them"};
        }
      }
      const Tokens answer = add_noise(std::move(core), used);
      for (std::size_t o = 0; o < k; ++o) {
        Sample s;
        s.question_id = "mc" + std::to_string(qi);
        s.question = q;
        s.answer_id = "a" + std::to_string(j);
        s.answer = answer;
        s.option = options[o];
        s.label = labels[o];
        out.push_back(std::move(s));
      }
    }
  }

  const SyntheticConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<std::string> content_;
};

}  // namespace

std::vector<Sample> generate_synthetic(const SyntheticConfig& config) {
  const auto [lo, hi] = config.n_options_range;
  if (config.n_tf_questions + config.n_mc_questions < 1 || config.answers_per_question < 1 ||
      lo < 1 || hi < lo) {
    throw std::invalid_argument(
        "synthetic corpus needs at least one question, one answer per question and a valid option "
        "range");
  }
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(config.irrelevant_span_prob) || !in_unit(config.uncertain_prob)) {
    throw std::invalid_argument("synthetic corpus probabilities must lie in [0, 1]");
  }
  // Options take one or two distinct content words each.
  if (config.vocab_size < 2 * hi) {
    throw DataError("vocab of " + std::to_string(config.vocab_size) + " content words is too small for " +
                    std::to_string(hi) + " options (need " + std::to_string(2 * hi) + ")");
  }
  return Generator(config).run();
}

}  // namespace antnet
