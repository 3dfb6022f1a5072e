#include "antnet/training.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace antnet {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string parameter_norms(const ParamStore& params) {
  std::ostringstream os;
  for (const auto& p : params.all()) {
    if (!p.trainable) continue;
    double sq = 0.0;
    for (double v : p.value.values()) sq += v * v;
    os << "  " << p.name << " |θ|=" << std::sqrt(sq) << '\n';
  }
  return os.str();
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be non-negative");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must lie in [0, 1)");
  if (batch_size < 1) throw std::invalid_argument("batch size must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("ADAM betas must lie in [0, 1)");
  }
}

// ---------------------------------------------------------------------------
// Adam

void Adam::step(ParamStore& params) {
  auto& ps = params.all();
  if (m_.empty()) {
    for (const auto& p : ps) {
      m_.emplace_back(p.value.rows(), p.value.cols());
      v_.emplace_back(p.value.rows(), p.value.cols());
    }
  }
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = config_.learning_rate;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    ad::Parameter& p = ps[k];
    if (!p.trainable) continue;
    auto theta = p.value.values();
    auto grad = p.grad.values();
    auto m = m_[k].values();
    auto v = v_[k].values();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
      v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      theta[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.adam_eps);
    }
  }
}

// ---------------------------------------------------------------------------
// Data preparation

SkeletonCache SkeletonCache::build(const std::vector<IndexedSample>& train) {
  SkeletonCache cache;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& s : train) {
    if (seen.emplace(s.question_id, s.answer_id).second) {
      cache.answers_[s.question_id].push_back(s.answer);
    }
  }
  return cache;
}

std::span<const std::vector<std::size_t>> SkeletonCache::answers(const std::string& question_id) const {
  auto it = answers_.find(question_id);
  if (it == answers_.end()) return {};
  return it->second;
}

PreparedCorpus prepare(const CorpusSplit& split, std::size_t max_len) {
  PreparedCorpus out;
  out.max_len = max_len;
  out.vocab = Vocab::build(split.train);
  out.train = index_all(split.train, out.vocab, max_len);
  out.validation = index_all(split.validation, out.vocab, max_len);
  out.test = index_all(split.test, out.vocab, max_len);
  for (const auto* part : {&out.train, &out.validation, &out.test})
    for (const auto& s : *part) out.truncated_options += s.option_truncated ? 1 : 0;
  out.cache = SkeletonCache::build(out.train);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

EvalReport report_from_predictions(std::span<const Label> gold, std::span<const Label> predicted) {
  if (gold.size() != predicted.size()) throw std::invalid_argument("gold/predicted size mismatch");
  if (gold.empty()) throw DataError("cannot evaluate an empty sample set");
  EvalReport r;
  r.total = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) ++r.confusion[index_of(gold[i])][index_of(predicted[i])];
  std::size_t correct = 0;
  for (std::size_t k = 0; k < kNumLabels; ++k) correct += r.confusion[k][k];
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.total);
  double f1_sum = 0.0;
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    std::size_t pred_k = 0, gold_k = 0;
    for (std::size_t j = 0; j < kNumLabels; ++j) {
      pred_k += r.confusion[j][k];
      gold_k += r.confusion[k][j];
    }
    const double tp = static_cast<double>(r.confusion[k][k]);
    r.precision[k] = pred_k == 0 ? 0.0 : tp / static_cast<double>(pred_k);
    r.recall[k] = gold_k == 0 ? 0.0 : tp / static_cast<double>(gold_k);
    const double denom = r.precision[k] + r.recall[k];
    r.f1[k] = denom == 0.0 ? 0.0 : 2.0 * r.precision[k] * r.recall[k] / denom;
    f1_sum += r.f1[k];
  }
  r.macro_f1 = f1_sum / static_cast<double>(kNumLabels);
  return r;
}

std::string EvalReport::record() const {
  json j;
  j["total"] = total;
  j["accuracy"] = accuracy;
  j["macro_f1"] = macro_f1;
  j["mean_loss"] = mean_loss;
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    const std::string l(to_string(kAllLabels[k]));
    j["per_class"][l] = {{"precision", precision[k]}, {"recall", recall[k]}, {"f1", f1[k]}};
  }
  j["confusion"] = confusion;
  return j.dump();
}

std::string EvalReport::table() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "accuracy " << accuracy << "  macro-F1 " << macro_f1 << "  (n=" << total << ")\n";
  os << std::left << std::setw(11) << "class" << std::right << std::setw(10) << "precision"
     << std::setw(10) << "recall" << std::setw(10) << "F1" << "   confusion (pred true/false/unc)\n";
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    os << std::left << std::setw(11) << to_string(kAllLabels[k]) << std::right << std::setw(10)
       << precision[k] << std::setw(10) << recall[k] << std::setw(10) << f1[k] << "   "
       << confusion[k][0] << '/' << confusion[k][1] << '/' << confusion[k][2] << '\n';
  }
  return os.str();
}

EvalReport evaluate(Model& model, const std::vector<IndexedSample>& samples,
                    const SkeletonCache& cache) {
  if (samples.empty()) throw DataError("cannot evaluate an empty sample set");
  std::vector<Label> gold, pred;
  gold.reserve(samples.size());
  pred.reserve(samples.size());
  double total_loss = 0.0;
  for (const auto& s : samples) {
    ad::Graph g;
    Forward f = model.forward(g, s, cache.answers(s.question_id), 0.0);
    total_loss += loss(f.logits, s.label).scalar();
    gold.push_back(s.label);
    pred.push_back(predicted_label(f.probs.value()));
  }
  EvalReport r = report_from_predictions(gold, pred);
  r.mean_loss = total_loss / static_cast<double>(samples.size());
  return r;
}

double batch_loss(Model& model, std::span<const IndexedSample> batch, const SkeletonCache& cache,
                  bool with_grad, double dropout_rate, std::uint64_t dropout_seed) {
  if (batch.empty()) return 0.0;
  const double inv = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const IndexedSample& s = batch[i];
    ad::Graph g(splitmix64(dropout_seed + i));
    Forward f = model.forward(g, s, cache.answers(s.question_id), dropout_rate);
    ad::Var l = ad::scale(loss(f.logits, s.label), inv);
    total += l.scalar();
    if (with_grad) g.backward(l);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Training

std::string EpochRecord::record() const {
  json j;
  j["epoch"] = epoch;
  j["train_loss"] = train_loss;
  j["val_loss"] = val_loss;
  j["val_acc"] = val_acc;
  if (train_acc) j["train_acc"] = *train_acc;
  return j.dump();
}

TrainResult train(Model model, const std::vector<IndexedSample>& train_set,
                  const std::vector<IndexedSample>& validation, const SkeletonCache& cache,
                  const TrainConfig& config) {
  config.validate();
  if (train_set.empty()) throw DataError("training split is empty");

  TrainResult result;
  result.model = model;
  Adam adam(config);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  double best_val = -1.0;
  std::size_t since_best = 0;
  const bool need_train_acc = config.track_train_accuracy || config.target_train_accuracy.has_value();

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0, batch_no = 0; start < order.size(); start += config.batch_size, ++batch_no) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<IndexedSample> batch;
      batch.reserve(end - start);
      for (std::size_t k = start; k < end; ++k) batch.push_back(train_set[order[k]]);

      model.params().zero_grad();
      const double l = batch_loss(model, batch, cache, true, config.dropout, rng());
      if (!std::isfinite(l)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_no) + "; parameter norms:\n" +
                           parameter_norms(model.params()));
      }
      epoch_loss += l * static_cast<double>(batch.size());
      adam.step(model.params());
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(train_set.size());
    if (!validation.empty()) {
      EvalReport val = evaluate(model, validation, cache);
      rec.val_loss = val.mean_loss;
      rec.val_acc = val.accuracy;
    }
    if (need_train_acc) rec.train_acc = evaluate(model, train_set, cache).accuracy;
    result.history.push_back(rec);

    if (validation.empty() || rec.val_acc > best_val) {
      best_val = rec.val_acc;
      result.best_epoch = epoch;
      result.model = model;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (config.target_train_accuracy && rec.train_acc && *rec.train_acc >= *config.target_train_accuracy) {
      result.reached_target = true;
      result.model = model;
      result.best_epoch = epoch;
      break;
    }
    if (config.patience > 0 && since_best >= config.patience) break;
  }
  return result;
}

ExperimentResult run_experiment(const VariantSpec& variant, Hyper hyper, const PreparedCorpus& data,
                                const TrainConfig& config) {
  hyper.vocab_size = data.vocab.size();
  Model model = Model::build(variant, hyper, config.seed);
  ExperimentResult out;
  out.training = train(std::move(model), data.train, data.validation, data.cache, config);
  out.test = evaluate(out.training.model, data.test, data.cache);
  return out;
}

std::vector<SweepRow> sweep(SweepParam param, std::span<const std::size_t> values,
                            const VariantSpec& variant, const Hyper& hyper,
                            const PreparedCorpus& data, const TrainConfig& config) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  std::vector<SweepRow> rows;
  for (std::size_t value : values) {
    Hyper h = hyper;
    (param == SweepParam::ne ? h.ne : h.hops) = value;
    rows.push_back(SweepRow{value, run_experiment(variant, h, data, config).test});
  }
  return rows;
}

}  // namespace antnet
