#ifndef ANTNET_CORPUS_HPP_
#define ANTNET_CORPUS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace antnet {

/// Malformed corpus input or a sample that violates the data model.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Label : std::uint8_t { True = 0, False = 1, Uncertain = 2 };
inline constexpr std::size_t kNumLabels = 3;
inline constexpr std::array<Label, kNumLabels> kAllLabels = {Label::True, Label::False,
                                                             Label::Uncertain};

std::string_view to_string(Label label);
Label parse_label(std::string_view text);
inline std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }

enum class QuestionType : std::uint8_t { TF, MC };

using Tokens = std::vector<std::string>;

/// One classification unit: question, answer, optional option term and label.
struct Sample {
  std::string question_id;
  Tokens question;
  std::string answer_id;
  Tokens answer;
  std::optional<Tokens> option;
  Label label = Label::Uncertain;

  QuestionType type() const { return option ? QuestionType::MC : QuestionType::TF; }
  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Throws DataError naming the sample when an invariant fails.
void validate(const Sample& s);

struct CorpusStats {
  std::size_t n_questions = 0;
  std::size_t n_answers = 0;
  std::size_t n_samples = 0;
  std::array<std::size_t, kNumLabels> per_label{};

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

CorpusStats compute_stats(const std::vector<Sample>& samples);
std::string format_stats_table(const CorpusStats& stats, std::string_view name = "corpus");
/// Single-line JSON record.
std::string stats_record(const CorpusStats& stats);

struct LoadedCorpus {
  std::vector<Sample> samples;
  CorpusStats stats;
};

/// Line-delimited JSON, one sample per line with keys question_id, question,
/// answer_id, answer, option (array or null) and label. Blank lines are
/// skipped.
LoadedCorpus load_corpus(const std::string& path);
LoadedCorpus parse_corpus(std::string_view text);
void save_corpus(const std::string& path, const std::vector<Sample>& samples);
std::string serialize_sample(const Sample& s);

enum class SplitGranularity { by_question, by_sample };

struct SplitSpec {
  double train_ratio = 0.8;      // train : test = 4 : 1
  double validation_fraction = 0.1;
  SplitGranularity granularity = SplitGranularity::by_question;
  std::uint64_t seed = 7;
};

struct CorpusSplit {
  std::vector<Sample> train;
  std::vector<Sample> validation;
  std::vector<Sample> test;
};

/// Deterministic partition. by_question keeps every question_id on one side.
CorpusSplit split(const std::vector<Sample>& samples, const SplitSpec& spec);

struct SyntheticConfig {
  std::size_t n_tf_questions = 20;
  std::size_t n_mc_questions = 20;
  std::size_t answers_per_question = 8;
  std::pair<std::size_t, std::size_t> n_options_range{2, 3};
  std::size_t vocab_size = 40;  // content words available for topics and options
  double irrelevant_span_prob = 0.3;
  double uncertain_prob = 0.2;
  std::uint64_t seed = 7;
};

/// Templated reverse-QA corpus whose labels are recoverable from the answer
/// template and the option term. Deterministic given the seed.
std::vector<Sample> generate_synthetic(const SyntheticConfig& config);

/// 64-bit FNV-1a over the serialized samples, for run manifests.
std::uint64_t fingerprint(const std::vector<Sample>& samples);

}  // namespace antnet

#endif  // ANTNET_CORPUS_HPP_
