#include "antnet/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace antnet {

using ad::Axis;
using ad::Tensor;
using ad::Var;

void Hyper::validate() const {
  if (vocab_size < 1) throw std::invalid_argument("vocabulary is empty");
  if (emb_dim < 1) throw std::invalid_argument("embedding dimension must be positive");
  if (hidden_dim < 2 || hidden_dim % 2 != 0) {
    throw std::invalid_argument("hidden dimension d must be even and >= 2");
  }
  if (ne < 1) throw std::invalid_argument("N_e must be at least 1");
}

// ---------------------------------------------------------------------------
// VariantSpec

std::string VariantSpec::name() const {
  switch (baseline) {
    case Baseline::bilstm_a: return "bilstm-a";
    case Baseline::bilstm_qa: return "bilstm-qa";
    case Baseline::none: break;
  }
  std::string n = "antnet";
  if (!use_sa) n += "-sa";
  if (!use_rr) n += "-rr";
  if (!use_mf) n += "-mf";
  return n;
}

std::string VariantSpec::display_name() const {
  switch (baseline) {
    case Baseline::bilstm_a: return "BiLSTM(A)";
    case Baseline::bilstm_qa: return "BiLSTM(Q+A)";
    case Baseline::none: break;
  }
  std::string n = "AntNet";
  if (!use_sa) n += "-SA";
  if (!use_rr) n += "-RR";
  if (!use_mf) n += "-MF";
  return n;
}

void VariantSpec::validate() const {
  if (is_baseline() && !(use_sa && use_rr && use_mf)) {
    throw std::invalid_argument("baselines take no ablation flags");
  }
  if (!use_sa && !use_rr && !use_mf) {
    throw std::invalid_argument("removing all three components is not one of the AntNet variants");
  }
}

VariantSpec VariantSpec::parse(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  std::replace(s.begin(), s.end(), '_', '-');
  VariantSpec spec;
  if (s == "bilstm-a") {
    spec.baseline = Baseline::bilstm_a;
    return spec;
  }
  if (s == "bilstm-qa" || s == "bilstm-q+a") {
    spec.baseline = Baseline::bilstm_qa;
    return spec;
  }
  if (s.rfind("antnet", 0) != 0) throw std::invalid_argument("unknown variant \"" + s + "\"");
  std::string_view rest = std::string_view(s).substr(6);
  while (!rest.empty()) {
    if (rest.size() < 3 || rest[0] != '-') throw std::invalid_argument("unknown variant \"" + s + "\"");
    const std::string_view part = rest.substr(1, 2);
    bool* flag = part == "sa" ? &spec.use_sa : part == "rr" ? &spec.use_rr
                                             : part == "mf" ? &spec.use_mf
                                                            : nullptr;
    if (flag == nullptr || !*flag) throw std::invalid_argument("unknown variant \"" + s + "\"");
    *flag = false;
    rest.remove_prefix(3);
  }
  spec.validate();
  return spec;
}

std::vector<VariantSpec> VariantSpec::ablation_grid() {
  std::vector<VariantSpec> out;
  for (const char* n : {"antnet", "antnet-sa", "antnet-rr", "antnet-mf", "antnet-sa-rr",
                        "antnet-sa-mf", "antnet-rr-mf"}) {
    out.push_back(parse(n));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model

std::size_t Model::memory_dim() const {
  return hyper_.hidden_dim + (variant_.use_rr ? hyper_.ne : 0);
}

std::size_t Model::classifier_dim() const {
  return variant_.is_baseline() ? hyper_.hidden_dim : 2 * hyper_.hidden_dim;
}

Model Model::build(const VariantSpec& variant, const Hyper& hyper, std::uint64_t seed) {
  variant.validate();
  hyper.validate();
  Model m;
  m.variant_ = variant;
  m.hyper_ = hyper;
  std::mt19937_64 rng(seed);
  ParamStore& ps = m.params_;
  const std::size_t d = hyper.hidden_dim;

  m.embedding_ = EmbeddingTable::create(ps, "embedding", hyper.vocab_size, hyper.emb_dim,
                                        hyper.freeze_embeddings, rng);
  switch (variant.baseline) {
    case Baseline::bilstm_a:
      m.answer_encoder_ = BiLstm(ps, "encoder.a", hyper.emb_dim, d, rng);
      break;
    case Baseline::bilstm_qa:
      m.question_encoder_ = BiLstm(ps, "encoder.q", hyper.emb_dim + 1, d, rng);
      break;
    case Baseline::none:
      m.question_encoder_ = BiLstm(ps, "encoder.q", hyper.emb_dim + 1, d, rng);
      if (variant.use_mf) m.answer_encoder_ = BiLstm(ps, "encoder.a", hyper.emb_dim, d, rng);
      if (variant.use_sa) {
        m.w_s_ = ps.add("skeleton.w_s", glorot_uniform(hyper.emb_dim, hyper.emb_dim, rng));
      }
      m.w_a_ = ps.add("question.w_a", glorot_uniform(d, d, rng));
      if (variant.use_mf && variant.use_rr) {
        m.w_p_ = ps.add("relevance.w_p", glorot_uniform(1, 2 * d, rng));
        m.b_p_ = ps.add("relevance.b_p", Tensor(1, 1));
      }
      if (variant.use_mf) {
        const std::size_t r = hyper.resolved_hop_width();
        m.full_stack_ = HopStack::create(ps, "fusion.full", hyper.hops, d, m.memory_dim(), r,
                                         hyper.share_hops, rng);
        m.skeleton_stack_ = HopStack::create(ps, "fusion.skeleton", hyper.hops, d, m.memory_dim(),
                                             r, hyper.share_hops, rng);
      }
      break;
  }
  m.classifier_ = ClassifierParams::create(ps, "classifier", m.classifier_dim(), rng);
  return m;
}

Model Model::attach(const VariantSpec& variant, const Hyper& hyper, ParamStore params) {
  variant.validate();
  hyper.validate();
  Model m;
  m.variant_ = variant;
  m.hyper_ = hyper;
  m.params_ = std::move(params);
  m.wire();
  return m;
}

void Model::wire() {
  const ParamStore& ps = params_;
  embedding_ = EmbeddingTable::attach(ps, "embedding");
  if (embedding_.dim() != hyper_.emb_dim || embedding_.vocab_size() != hyper_.vocab_size) {
    throw ShapeError("embedding table does not match the hyperparameters");
  }
  if (ps.contains("encoder.q.fwd.w_ih")) question_encoder_ = BiLstm::attach(ps, "encoder.q");
  if (ps.contains("encoder.a.fwd.w_ih")) answer_encoder_ = BiLstm::attach(ps, "encoder.a");
  if (!variant_.is_baseline()) {
    if (variant_.use_sa) w_s_ = ps.find("skeleton.w_s");
    w_a_ = ps.find("question.w_a");
    if (variant_.use_mf && variant_.use_rr) {
      w_p_ = ps.find("relevance.w_p");
      b_p_ = ps.find("relevance.b_p");
    }
    if (variant_.use_mf) {
      full_stack_ = HopStack::attach(ps, "fusion.full", hyper_.hops, hyper_.share_hops);
      skeleton_stack_ = HopStack::attach(ps, "fusion.skeleton", hyper_.hops, hyper_.share_hops);
    }
  }
  classifier_ = ClassifierParams::attach(ps, "classifier");
}

Tensor Model::skeleton_context(std::span<const std::vector<std::size_t>> answers) const {
  std::vector<Tensor> embs;
  embs.reserve(answers.size());
  const Tensor& table = params_[embedding_.id()].value;
  for (const auto& ans : answers) {
    Tensor rows(ans.size(), embedding_.dim());
    for (std::size_t k = 0; k < ans.size(); ++k) {
      if (ans[k] >= embedding_.vocab_size()) throw ShapeError("token index outside vocabulary");
      for (std::size_t c = 0; c < embedding_.dim(); ++c) rows(k, c) = table(ans[k], c);
    }
    embs.push_back(std::move(rows));
  }
  return answer_context(embs);
}

Forward Model::forward(ad::Graph& g, const IndexedSample& sample,
                       std::span<const std::vector<std::size_t>> context, double dropout_rate) {
  if (sample.question.empty() || sample.answer.empty()) {
    throw ShapeError("sample " + sample.question_id + "/" + sample.answer_id +
                     " has an empty question or answer");
  }
  return variant_.is_baseline() ? forward_baseline(g, sample, dropout_rate)
                                : forward_antnet(g, sample, context, dropout_rate);
}

Forward Model::forward_antnet(ad::Graph& g, const IndexedSample& sample,
                              std::span<const std::vector<std::size_t>> context,
                              double dropout_rate) {
  Forward f;
  Var q_emb = embedding_.lookup(g, params_, sample.question);
  Tensor flags(sample.indicator.size(), 1, sample.indicator);
  if (flags.rows() != sample.question.size()) throw ShapeError("indicator length mismatch");
  Var q_in = ad::concat(q_emb, g.constant(std::move(flags)), Axis::cols);
  f.question_states = ad::dropout(question_encoder_.encode(g, params_, q_in), dropout_rate);

  if (variant_.use_sa) {
    const std::vector<std::size_t> own[] = {sample.answer};
    const auto answers = context.empty() ? std::span<const std::vector<std::size_t>>(own) : context;
    Var ctx;
    if (params_[embedding_.id()].trainable) {
      std::vector<Var> means;
      for (const auto& a : answers) means.push_back(ad::mean(embedding_.lookup(g, params_, a), Axis::rows));
      ctx = ad::mean(ad::concat(means, Axis::rows), Axis::rows);
    } else {
      ctx = g.constant(skeleton_context(answers));
    }
    f.skeleton = skeleton_scores(q_emb, ctx, g.param(params_[w_s_]));
    f.u = skeleton_repr(f.question_states, *f.skeleton);
  } else {
    f.u = uniform_repr(f.question_states);
  }

  FullRepr full = full_repr(f.question_states, f.u, g.param(params_[w_a_]));
  f.v = full.v;
  f.question_attention = full.att;

  if (variant_.use_mf) {
    f.answer_states =
        ad::dropout(encode_answer(g, params_, embedding_, answer_encoder_, sample.answer), dropout_rate);
    if (variant_.use_rr) {
      f.relevance = relevance_scores(f.answer_states, f.u, g.param(params_[w_p_]), g.param(params_[b_p_]));
      f.memory = augment(f.answer_states, enlarge(f.relevance, hyper_.ne));
    } else {
      f.memory = f.answer_states;
    }
    f.fusion = fuse(g, params_, f.v, f.u, f.memory, full_stack_, skeleton_stack_, hyper_.hops);
    f.features = f.fusion.joint;
  } else {
    f.features = ad::concat(f.v, f.u, Axis::cols);
  }

  Var features = ad::dropout(f.features, dropout_rate);
  f.logits = classifier_logits(g, params_, features, classifier_);
  f.probs = ad::softmax(f.logits, Axis::cols);
  return f;
}

Forward Model::forward_baseline(ad::Graph& g, const IndexedSample& sample, double dropout_rate) {
  Forward f;
  Var states;
  if (variant_.baseline == Baseline::bilstm_a) {
    states = encode_answer(g, params_, embedding_, answer_encoder_, sample.answer);
    f.answer_states = states;
  } else {
    std::vector<std::size_t> tokens = sample.question;
    tokens.insert(tokens.end(), sample.answer.begin(), sample.answer.end());
    std::vector<double> flags = sample.indicator;
    flags.resize(tokens.size(), 0.0);
    states = encode_question(g, params_, embedding_, question_encoder_, tokens, flags);
    f.question_states = states;
  }
  states = ad::dropout(states, dropout_rate);
  f.features = ad::mean(states, Axis::rows);
  Var features = ad::dropout(f.features, dropout_rate);
  f.logits = classifier_logits(g, params_, features, classifier_);
  f.probs = ad::softmax(f.logits, Axis::cols);
  return f;
}

}  // namespace antnet
