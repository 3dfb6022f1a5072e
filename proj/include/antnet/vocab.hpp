#ifndef ANTNET_VOCAB_HPP_
#define ANTNET_VOCAB_HPP_

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "antnet/corpus.hpp"

namespace antnet {

/// Token ↔ index map. Index 0 is reserved for out-of-vocabulary tokens.
class Vocab {
 public:
  static constexpr std::size_t kUnk = 0;
  static constexpr const char* kUnkToken = "<unk>";

  Vocab();
  explicit Vocab(std::vector<std::string> tokens);  // tokens[0] must be <unk>

  /// Question, answer and option tokens of `samples`, in first-seen order.
  static Vocab build(const std::vector<Sample>& samples);

  std::size_t add(const std::string& token);
  std::size_t index(const std::string& token) const;
  bool contains(const std::string& token) const { return ids_.count(token) != 0; }
  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> ids_;
};

inline constexpr std::size_t kDefaultMaxLen = 33;

/// Sample mapped to vocabulary indices after prefix truncation.
struct IndexedSample {
  std::string question_id;
  std::string answer_id;
  std::vector<std::size_t> question;
  std::vector<std::size_t> answer;
  /// One flag per (truncated) question position; 1 on option-term words.
  std::vector<double> indicator;
  bool is_mc = false;
  /// MC sample whose option term no longer fits in the truncated question.
  bool option_truncated = false;
  Label label = Label::Uncertain;
};

/// Positions of the option term within `question`: the first contiguous
/// occurrence if any, otherwise the first occurrence of each option token.
/// Empty when some option token is absent.
std::vector<std::size_t> option_positions(const Tokens& question, const Tokens& option);

IndexedSample truncate_and_index(const Sample& sample, const Vocab& vocab,
                                 std::size_t max_len = kDefaultMaxLen);

std::vector<IndexedSample> index_all(const std::vector<Sample>& samples, const Vocab& vocab,
                                     std::size_t max_len = kDefaultMaxLen);

}  // namespace antnet

#endif  // ANTNET_VOCAB_HPP_
