#include "antnet/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace antnet {

using nlohmann::json;

std::string_view to_string(Label label) {
  switch (label) {
    case Label::True: return "true";
    case Label::False: return "false";
    case Label::Uncertain: return "uncertain";
  }
  return "uncertain";
}

Label parse_label(std::string_view text) {
  if (text == "true") return Label::True;
  if (text == "false") return Label::False;
  if (text == "uncertain") return Label::Uncertain;
  throw DataError("unknown label \"" + std::string(text) + "\"");
}

void validate(const Sample& s) {
  const std::string who = "sample " + s.question_id + "/" + s.answer_id;
  if (s.question.empty()) throw DataError(who + ": empty question");
  if (s.answer.empty()) throw DataError(who + ": empty answer");
  if (s.option) {
    if (s.option->empty()) throw DataError(who + ": MC sample with empty option");
    for (const auto& tok : *s.option) {
      if (std::find(s.question.begin(), s.question.end(), tok) == s.question.end()) {
        throw DataError(who + ": option token \"" + tok + "\" does not occur in the question");
      }
    }
  }
}

CorpusStats compute_stats(const std::vector<Sample>& samples) {
  CorpusStats st;
  std::unordered_set<std::string> questions;
  std::set<std::pair<std::string, std::string>> answers;
  for (const auto& s : samples) {
    questions.insert(s.question_id);
    answers.emplace(s.question_id, s.answer_id);
    ++st.per_label[index_of(s.label)];
  }
  st.n_questions = questions.size();
  st.n_answers = answers.size();
  st.n_samples = samples.size();
  return st;
}

std::string format_stats_table(const CorpusStats& stats, std::string_view name) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "Data set" << std::right << std::setw(12) << "#Questions"
     << std::setw(12) << "#Answers" << std::setw(12) << "#Samples" << "  (True/False/Uncertain)\n";
  os << std::left << std::setw(12) << name << std::right << std::setw(12) << stats.n_questions
     << std::setw(12) << stats.n_answers << std::setw(12) << stats.n_samples << "  "
     << stats.per_label[0] << '/' << stats.per_label[1] << '/' << stats.per_label[2] << '\n';
  return os.str();
}

std::string stats_record(const CorpusStats& stats) {
  json j = {{"n_questions", stats.n_questions},
            {"n_answers", stats.n_answers},
            {"n_samples", stats.n_samples},
            {"true", stats.per_label[0]},
            {"false", stats.per_label[1]},
            {"uncertain", stats.per_label[2]}};
  return j.dump();
}

namespace {

Tokens token_array(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    throw DataError("line " + std::to_string(line) + ": \"" + key + "\" must be an array of strings");
  }
  Tokens out;
  out.reserve(it->size());
  for (const auto& t : *it) {
    if (!t.is_string()) {
      throw DataError("line " + std::to_string(line) + ": \"" + key + "\" holds a non-string token");
    }
    out.push_back(t.get<std::string>());
  }
  return out;
}

std::string string_field(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError("line " + std::to_string(line) + ": missing \"" + key + "\"");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw DataError("line " + std::to_string(line) + ": \"" + key + "\" must be a string");
}

Sample parse_line(std::string_view line, std::size_t lineno) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError("line " + std::to_string(lineno) + ": parse error: " + e.what());
  }
  if (!j.is_object()) throw DataError("line " + std::to_string(lineno) + ": expected an object");
  Sample s;
  s.question_id = string_field(j, "question_id", lineno);
  s.question = token_array(j, "question", lineno);
  s.answer_id = string_field(j, "answer_id", lineno);
  s.answer = token_array(j, "answer", lineno);
  auto opt = j.find("option");
  if (opt != j.end() && !opt->is_null()) s.option = token_array(j, "option", lineno);
  auto lab = j.find("label");
  if (lab == j.end() || !lab->is_string()) {
    throw DataError("line " + std::to_string(lineno) + ": missing string \"label\"");
  }
  try {
    s.label = parse_label(lab->get<std::string>());
  } catch (const DataError& e) {
    throw DataError("line " + std::to_string(lineno) + ": " + e.what());
  }
  try {
    validate(s);
  } catch (const DataError& e) {
    throw DataError("line " + std::to_string(lineno) + ": " + e.what());
  }
  return s;
}

}  // namespace

LoadedCorpus parse_corpus(std::string_view text) {
  LoadedCorpus out;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) {
      out.samples.push_back(parse_line(line, lineno));
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  out.stats = compute_stats(out.samples);
  return out;
}

LoadedCorpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str());
}

std::string serialize_sample(const Sample& s) {
  json j;
  j["question_id"] = s.question_id;
  j["question"] = s.question;
  j["answer_id"] = s.answer_id;
  j["answer"] = s.answer;
  j["option"] = s.option ? json(*s.option) : json(nullptr);
  j["label"] = std::string(to_string(s.label));
  return j.dump();
}

void save_corpus(const std::string& path, const std::vector<Sample>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file " + path);
  for (const auto& s : samples) out << serialize_sample(s) << '\n';
}

CorpusSplit split(const std::vector<Sample>& samples, const SplitSpec& spec) {
  if (!(spec.train_ratio > 0.0 && spec.train_ratio < 1.0)) {
    throw std::invalid_argument("train ratio must lie in (0, 1)");
  }
  if (!(spec.validation_fraction >= 0.0 && spec.validation_fraction < 1.0)) {
    throw std::invalid_argument("validation fraction must lie in [0, 1)");
  }

  // Units are questions or individual samples; each unit lists sample indices.
  std::vector<std::vector<std::size_t>> units;
  if (spec.granularity == SplitGranularity::by_question) {
    std::unordered_map<std::string, std::size_t> slot;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      auto [it, fresh] = slot.emplace(samples[i].question_id, units.size());
      if (fresh) units.emplace_back();
      units[it->second].push_back(i);
    }
    if (units.size() < 3) {
      throw DataError("split by question needs at least 3 questions, corpus has " +
                      std::to_string(units.size()));
    }
  } else {
    for (std::size_t i = 0; i < samples.size(); ++i) units.push_back({i});
    if (units.size() < 3) throw DataError("split needs at least 3 samples");
  }

  std::vector<std::size_t> order(units.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);

  const double n = static_cast<double>(units.size());
  std::size_t n_test = static_cast<std::size_t>(std::llround(n * (1.0 - spec.train_ratio)));
  n_test = std::clamp<std::size_t>(n_test, 1, units.size() - 1);
  const std::size_t n_train_all = units.size() - n_test;
  std::size_t n_val =
      static_cast<std::size_t>(std::llround(static_cast<double>(n_train_all) * spec.validation_fraction));
  n_val = std::min(n_val, n_train_all - 1);

  // side: 0 train, 1 validation, 2 test
  std::vector<int> side(samples.size(), 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int s = k < n_test ? 2 : (k < n_test + n_val ? 1 : 0);
    for (std::size_t i : units[order[k]]) side[i] = s;
  }
  CorpusSplit out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    (side[i] == 0 ? out.train : side[i] == 1 ? out.validation : out.test).push_back(samples[i]);
  }
  return out;
}

std::uint64_t fingerprint(const std::vector<Sample>& samples) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& s : samples) {
    for (unsigned char c : serialize_sample(s)) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= '\n';
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace antnet
