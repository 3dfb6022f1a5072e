#ifndef ANTNET_TRAINING_HPP_
#define ANTNET_TRAINING_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "antnet/corpus.hpp"
#include "antnet/model.hpp"
#include "antnet/vocab.hpp"

namespace antnet {

struct TrainConfig {
  double learning_rate = 5e-4;
  double dropout = 0.2;
  std::size_t max_epochs = 50;
  std::size_t batch_size = 32;
  std::uint64_t seed = 7;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  /// Epochs without a validation-accuracy improvement before stopping;
  /// 0 disables early stopping.
  std::size_t patience = 10;
  /// Stop as soon as accuracy on the training split reaches this value.
  std::optional<double> target_train_accuracy;
  bool track_train_accuracy = false;

  void validate() const;
};

class Adam {
 public:
  explicit Adam(const TrainConfig& config) : config_(config) {}
  /// One update of every trainable parameter from its accumulated grad.
  void step(ParamStore& params);
  std::size_t steps() const { return t_; }

 private:
  TrainConfig config_;
  std::vector<ad::Tensor> m_, v_;
  std::size_t t_ = 0;
};

/// Answers (as token indices) seen for each training question; drives the
/// skeleton attention of samples whose question was seen in training.
class SkeletonCache {
 public:
  static SkeletonCache build(const std::vector<IndexedSample>& train);

  /// Empty span when the question is unknown.
  std::span<const std::vector<std::size_t>> answers(const std::string& question_id) const;
  const std::unordered_map<std::string, std::vector<std::vector<std::size_t>>>& entries() const {
    return answers_;
  }
  void set(const std::string& question_id, std::vector<std::vector<std::size_t>> answers) {
    answers_[question_id] = std::move(answers);
  }

 private:
  std::unordered_map<std::string, std::vector<std::vector<std::size_t>>> answers_;
};

struct PreparedCorpus {
  Vocab vocab;
  std::vector<IndexedSample> train;
  std::vector<IndexedSample> validation;
  std::vector<IndexedSample> test;
  SkeletonCache cache;
  std::size_t max_len = kDefaultMaxLen;
  std::size_t truncated_options = 0;
};

/// Vocabulary from the training split only, then truncation and indexing.
PreparedCorpus prepare(const CorpusSplit& split, std::size_t max_len = kDefaultMaxLen);

struct EvalReport {
  std::size_t total = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::array<double, kNumLabels> precision{};
  std::array<double, kNumLabels> recall{};
  std::array<double, kNumLabels> f1{};
  /// confusion[gold][predicted]
  std::array<std::array<std::size_t, kNumLabels>, kNumLabels> confusion{};
  double mean_loss = 0.0;

  std::string record() const;  // single-line JSON
  std::string table() const;
};

/// Builds the report from gold/predicted label pairs. 0/0 ratios count as 0.
EvalReport report_from_predictions(std::span<const Label> gold, std::span<const Label> predicted);

/// Dropout-free evaluation. Throws DataError on an empty sample set.
EvalReport evaluate(Model& model, const std::vector<IndexedSample>& samples,
                    const SkeletonCache& cache);

/// Mean cross-entropy of a batch; when `with_grad` the grads of every
/// trainable parameter are accumulated (not zeroed here).
double batch_loss(Model& model, std::span<const IndexedSample> batch, const SkeletonCache& cache,
                  bool with_grad, double dropout_rate = 0.0, std::uint64_t dropout_seed = 0);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  std::optional<double> train_acc;

  std::string record() const;
};

struct TrainResult {
  Model model;  // best-on-validation parameters
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  bool reached_target = false;
};

/// ADAM over unpadded samples with gradient accumulation per batch.
/// Deterministic given config.seed. Throws NumericError on a non-finite loss.
TrainResult train(Model model, const std::vector<IndexedSample>& train_set,
                  const std::vector<IndexedSample>& validation, const SkeletonCache& cache,
                  const TrainConfig& config);

struct ExperimentResult {
  TrainResult training;
  EvalReport test;
};

/// Builds `variant` with hyper.vocab_size taken from the prepared corpus,
/// trains it and evaluates on the test split.
ExperimentResult run_experiment(const VariantSpec& variant, Hyper hyper,
                                const PreparedCorpus& data, const TrainConfig& config);

enum class SweepParam { ne, hops };

struct SweepRow {
  std::size_t value = 0;
  EvalReport report;
};

std::vector<SweepRow> sweep(SweepParam param, std::span<const std::size_t> values,
                            const VariantSpec& variant, const Hyper& hyper,
                            const PreparedCorpus& data, const TrainConfig& config);

}  // namespace antnet

#endif  // ANTNET_TRAINING_HPP_
