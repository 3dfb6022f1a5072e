#include "antnet/vocab.hpp"

#include <algorithm>
#include <stdexcept>

namespace antnet {

Vocab::Vocab() { add(kUnkToken); }

Vocab::Vocab(std::vector<std::string> tokens) {
  if (tokens.empty() || tokens.front() != kUnkToken) {
    throw DataError("vocabulary must start with the reserved " + std::string(kUnkToken) + " token");
  }
  for (const auto& t : tokens) {
    if (ids_.count(t) != 0) throw DataError("duplicate vocabulary token \"" + t + "\"");
    add(t);
  }
}

Vocab Vocab::build(const std::vector<Sample>& samples) {
  Vocab v;
  for (const auto& s : samples) {
    for (const auto& t : s.question) v.add(t);
    for (const auto& t : s.answer) v.add(t);
    if (s.option)
      for (const auto& t : *s.option) v.add(t);
  }
  return v;
}

std::size_t Vocab::add(const std::string& token) {
  auto [it, fresh] = ids_.emplace(token, tokens_.size());
  if (fresh) tokens_.push_back(token);
  return it->second;
}

std::size_t Vocab::index(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

std::vector<std::size_t> option_positions(const Tokens& question, const Tokens& option) {
  if (option.empty()) return {};
  auto hit = std::search(question.begin(), question.end(), option.begin(), option.end());
  std::vector<std::size_t> pos;
  if (hit != question.end()) {
    const auto start = static_cast<std::size_t>(hit - question.begin());
    for (std::size_t k = 0; k < option.size(); ++k) pos.push_back(start + k);
    return pos;
  }
  for (const auto& tok : option) {
    auto it = std::find(question.begin(), question.end(), tok);
    if (it == question.end()) return {};
    const auto p = static_cast<std::size_t>(it - question.begin());
    if (std::find(pos.begin(), pos.end(), p) == pos.end()) pos.push_back(p);
  }
  std::sort(pos.begin(), pos.end());
  return pos;
}

IndexedSample truncate_and_index(const Sample& sample, const Vocab& vocab, std::size_t max_len) {
  if (max_len == 0) throw std::invalid_argument("max_len must be positive");
  IndexedSample out;
  out.question_id = sample.question_id;
  out.answer_id = sample.answer_id;
  out.label = sample.label;
  out.is_mc = sample.option.has_value();

  const Tokens question(sample.question.begin(),
                        sample.question.begin() + std::min(max_len, sample.question.size()));
  const std::size_t answer_len = std::min(max_len, sample.answer.size());
  for (const auto& t : question) out.question.push_back(vocab.index(t));
  for (std::size_t n = 0; n < answer_len; ++n) out.answer.push_back(vocab.index(sample.answer[n]));

  out.indicator.assign(question.size(), 0.0);
  if (sample.option) {
    const auto pos = option_positions(question, *sample.option);
    if (pos.empty()) {
      out.option_truncated = true;
    } else {
      for (std::size_t p : pos) out.indicator[p] = 1.0;
    }
  }
  return out;
}

std::vector<IndexedSample> index_all(const std::vector<Sample>& samples, const Vocab& vocab,
                                     std::size_t max_len) {
  std::vector<IndexedSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(truncate_and_index(s, vocab, max_len));
  return out;
}

}  // namespace antnet
