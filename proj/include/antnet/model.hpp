#ifndef ANTNET_MODEL_HPP_
#define ANTNET_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "antnet/answer_repr.hpp"
#include "antnet/encoders.hpp"
#include "antnet/fusion.hpp"
#include "antnet/params.hpp"
#include "antnet/question_repr.hpp"
#include "antnet/vocab.hpp"

namespace antnet {

struct Hyper {
  std::size_t vocab_size = 0;
  std::size_t emb_dim = 256;
  std::size_t hidden_dim = 256;  // d, both directions together
  std::size_t ne = 13;
  std::size_t hops = 3;
  std::size_t hop_width = 0;  // r; 0 means r = d
  bool share_hops = false;
  bool freeze_embeddings = true;

  std::size_t resolved_hop_width() const { return hop_width == 0 ? hidden_dim : hop_width; }
  void validate() const;
};

enum class Baseline { none, bilstm_a, bilstm_qa };

/// One of the seven AntNet variants or one of the two BiLSTM baselines.
struct VariantSpec {
  bool use_sa = true;
  bool use_rr = true;
  bool use_mf = true;
  Baseline baseline = Baseline::none;

  /// antnet, antnet-sa, antnet-rr, antnet-mf, antnet-sa-rr, antnet-sa-mf,
  /// antnet-rr-mf, bilstm-a, bilstm-qa.
  std::string name() const;
  std::string display_name() const;  // AntNet−SA−MF style
  bool is_baseline() const { return baseline != Baseline::none; }
  void validate() const;

  /// Accepts the names above; removal suffixes may come in any order.
  static VariantSpec parse(std::string_view text);
  /// Full model followed by the six ablations.
  static std::vector<VariantSpec> ablation_grid();

  friend bool operator==(const VariantSpec&, const VariantSpec&) = default;
};

/// Everything the forward pass produced for one triplet.
struct Forward {
  ad::Var logits;  // 1×3
  ad::Var probs;   // 1×3
  std::optional<SkeletonWeights> skeleton;
  ad::Var question_states;  // h^Q
  ad::Var answer_states;    // h^A
  ad::Var u;
  ad::Var v;
  ad::Var question_attention;  // att^Q
  ad::Var relevance;           // p, N×1
  ad::Var memory;              // h′
  FuseResult fusion;
  ad::Var features;  // classifier input
};

class Model {
 public:
  Model() = default;
  /// Fresh parameters for `variant`, initialized from `seed`.
  static Model build(const VariantSpec& variant, const Hyper& hyper, std::uint64_t seed);
  /// Wraps an existing parameter store (e.g. from a checkpoint).
  static Model attach(const VariantSpec& variant, const Hyper& hyper, ParamStore params);

  /// Builds the graph for one sample. `context` lists the answers whose
  /// embeddings drive skeleton attention; empty means the sample's own answer.
  /// Dropout at `dropout_rate` is applied to encoder outputs and to the
  /// classifier input; pass 0 for evaluation.
  Forward forward(ad::Graph& g, const IndexedSample& sample,
                  std::span<const std::vector<std::size_t>> context, double dropout_rate);

  /// Mean-of-means answer embedding used by skeleton attention.
  ad::Tensor skeleton_context(std::span<const std::vector<std::size_t>> answers) const;

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  const Hyper& hyper() const { return hyper_; }
  const VariantSpec& variant() const { return variant_; }
  const EmbeddingTable& embedding() const { return embedding_; }

  /// Width of answer memory entering the fusion hops: d+N_e, or d without RR.
  std::size_t memory_dim() const;
  std::size_t classifier_dim() const;

 private:
  void wire();

  Forward forward_antnet(ad::Graph& g, const IndexedSample& sample,
                         std::span<const std::vector<std::size_t>> context, double dropout_rate);
  Forward forward_baseline(ad::Graph& g, const IndexedSample& sample, double dropout_rate);

  VariantSpec variant_;
  Hyper hyper_;
  ParamStore params_;

  EmbeddingTable embedding_;
  BiLstm question_encoder_;
  BiLstm answer_encoder_;
  ParamId w_s_, w_a_, w_p_, b_p_;
  HopStack full_stack_, skeleton_stack_;
  ClassifierParams classifier_;
};

}  // namespace antnet

#endif  // ANTNET_MODEL_HPP_
