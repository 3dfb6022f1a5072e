#ifndef ANTNET_ENCODERS_HPP_
#define ANTNET_ENCODERS_HPP_

#include <cstddef>
#include <random>
#include <span>
#include <string>

#include "antnet/autodiff.hpp"
#include "antnet/params.hpp"
#include "antnet/vocab.hpp"

namespace antnet {

/// vocab_size × dim word vectors. Frozen tables are non-trainable parameters
/// and enter graphs as constants.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  /// Rows drawn from uniform(−0.1, 0.1).
  static EmbeddingTable create(ParamStore& store, const std::string& name, std::size_t vocab_size,
                               std::size_t dim, bool frozen, std::mt19937_64& rng);
  static EmbeddingTable attach(const ParamStore& store, const std::string& name);

  /// n×dim matrix of the rows for `ids`. Throws ShapeError on an index
  /// outside the table.
  ad::Var lookup(ad::Graph& g, ParamStore& store, std::span<const std::size_t> ids) const;
  /// Mean row of `ids` as a 1×dim tensor, outside any graph.
  ad::Tensor mean_row(const ParamStore& store, std::span<const std::size_t> ids) const;

  ParamId id() const { return id_; }
  std::size_t dim() const { return dim_; }
  std::size_t vocab_size() const { return vocab_size_; }

 private:
  ParamId id_;
  std::size_t dim_ = 0;
  std::size_t vocab_size_ = 0;
};

/// Reads "token v1 ... vD" lines; rows for tokens in `vocab` are replaced.
/// Returns the number of rows loaded.
std::size_t load_pretrained_embeddings(ParamStore& store, const EmbeddingTable& table,
                                       const Vocab& vocab, const std::string& path);

/// One LSTM direction. Gates are stacked [input, forget, output, cell] in
/// W_ih (4h×in), W_hh (4h×h) and b (1×4h).
struct LstmParams {
  ParamId w_ih;
  ParamId w_hh;
  ParamId bias;
  std::size_t hidden = 0;
};

/// Bidirectional LSTM producing out_dim = 2·(out_dim/2) features per position.
class BiLstm {
 public:
  BiLstm() = default;
  /// Glorot-uniform weights, zero biases except the forget gate (1.0).
  BiLstm(ParamStore& store, const std::string& prefix, std::size_t in_dim, std::size_t out_dim,
         std::mt19937_64& rng);
  static BiLstm attach(const ParamStore& store, const std::string& prefix);

  /// n×in_dim inputs → n×out_dim states, [forward; backward] per row.
  ad::Var encode(ad::Graph& g, ParamStore& store, ad::Var inputs) const;

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return 2 * forward_.hidden; }
  const LstmParams& forward_params() const { return forward_; }
  const LstmParams& backward_params() const { return backward_; }

 private:
  ad::Var run(ad::Graph& g, ParamStore& store, const LstmParams& p, ad::Var pre,
              bool reverse) const;

  LstmParams forward_;
  LstmParams backward_;
  std::size_t in_dim_ = 0;
};

/// h^Q: per-word input is [embedding; indicator] (emb_dim + 1).
ad::Var encode_question(ad::Graph& g, ParamStore& store, const EmbeddingTable& emb,
                        const BiLstm& lstm, std::span<const std::size_t> question,
                        std::span<const double> indicator);

/// h^A: per-word input is the embedding alone.
ad::Var encode_answer(ad::Graph& g, ParamStore& store, const EmbeddingTable& emb,
                      const BiLstm& lstm, std::span<const std::size_t> answer);

}  // namespace antnet

#endif  // ANTNET_ENCODERS_HPP_
