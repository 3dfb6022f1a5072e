#include "antnet/toy.hpp"

#include <algorithm>

namespace antnet::toy {

Hyper hyper(bool freeze_embeddings) {
  Hyper h;
  h.vocab_size = 20;
  h.emb_dim = 8;
  h.hidden_dim = 8;
  h.ne = 3;
  h.hops = 2;
  h.hop_width = 6;
  h.freeze_embeddings = freeze_embeddings;
  return h;
}

IndexedSample random_sample(std::mt19937_64& rng, std::size_t vocab, std::size_t max_len,
                            const std::string& qid) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<std::size_t> tok(0, vocab - 1);
  std::uniform_int_distribution<int> lab(0, 2);
  IndexedSample s;
  s.question_id = qid;
  s.answer_id = "a" + std::to_string(rng() % 1000);
  const std::size_t m = len(rng), n = len(rng);
  for (std::size_t i = 0; i < m; ++i) s.question.push_back(tok(rng));
  for (std::size_t i = 0; i < n; ++i) s.answer.push_back(tok(rng));
  s.indicator.assign(m, 0.0);
  if (rng() % 2 == 0) {
    s.is_mc = true;
    s.indicator[rng() % m] = 1.0;
    if (m > 1) s.indicator[rng() % m] = 1.0;
  }
  s.label = kAllLabels[static_cast<std::size_t>(lab(rng))];
  return s;
}

std::vector<IndexedSample> batch(std::uint64_t seed, std::size_t count, std::size_t max_len) {
  std::mt19937_64 rng(seed);
  std::vector<IndexedSample> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(random_sample(rng, 20, max_len, "q" + std::to_string(i % 2)));
  }
  return out;
}

Model model(const VariantSpec& variant, std::uint64_t seed, bool freeze_embeddings) {
  Model m = Model::build(variant, hyper(freeze_embeddings), seed);
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  ad::Tensor& table = m.params()[m.embedding().id()].value;
  table = uniform(table.rows(), table.cols(), 1.0, rng);
  return m;
}

ObjectiveFn objective(Model& model, const std::vector<IndexedSample>& samples,
                      const SkeletonCache& cache) {
  return [&model, &samples, &cache](ParamStore&, bool with_grad) {
    return batch_loss(model, samples, cache, with_grad);
  };
}

std::string module_of(const std::string& name) {
  if (name.rfind("embedding", 0) == 0 || name.rfind("encoder.", 0) == 0) return "encoders";
  if (name.rfind("skeleton.", 0) == 0 || name.rfind("question.", 0) == 0) return "question-repr";
  if (name.rfind("relevance.", 0) == 0) return "answer-repr";
  if (name.rfind("fusion.", 0) == 0 || name.rfind("classifier.", 0) == 0) return "fusion-classifier";
  return "other";
}

std::vector<ModuleError> by_module(const GradCheckReport& report) {
  std::vector<ModuleError> out;
  for (const auto& p : report.per_param) {
    const std::string mod = module_of(p.name);
    auto it = std::find_if(out.begin(), out.end(), [&](const ModuleError& e) { return e.module == mod; });
    if (it == out.end()) {
      out.push_back(ModuleError{mod, p.max_relative_error, p.name});
    } else if (p.max_relative_error > it->max_relative_error) {
      it->max_relative_error = p.max_relative_error;
      it->worst_param = p.name;
    }
  }
  return out;
}

}  // namespace antnet::toy
