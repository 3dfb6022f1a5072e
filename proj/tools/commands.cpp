#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "antnet/checkpoint.hpp"
#include "antnet/encoders.hpp"
#include "json.hpp"

namespace antnet::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ordered_json hyper_json(const Hyper& h) {
  return {{"vocab_size", h.vocab_size}, {"emb_dim", h.emb_dim},     {"hidden_dim", h.hidden_dim},
          {"ne", h.ne},                 {"hops", h.hops},           {"hop_width", h.resolved_hop_width()},
          {"share_hops", h.share_hops}, {"freeze_embeddings", h.freeze_embeddings}};
}

ordered_json train_json(const TrainConfig& c) {
  return {{"lr", c.learning_rate},     {"dropout", c.dropout}, {"max_epochs", c.max_epochs},
          {"batch_size", c.batch_size}, {"seed", c.seed},      {"beta1", c.beta1},
          {"beta2", c.beta2},           {"adam_eps", c.adam_eps}, {"patience", c.patience}};
}

ordered_json data_json(const DataOptions& d, const std::vector<Sample>& samples) {
  ordered_json j;
  if (d.data.empty()) {
    const SyntheticConfig s = synthetic_config(d);
    j["source"] = "synthetic:" + d.synthetic;
    j["synthetic"] = {{"n_tf_questions", s.n_tf_questions},
                      {"n_mc_questions", s.n_mc_questions},
                      {"answers_per_question", s.answers_per_question},
                      {"n_options_range", {s.n_options_range.first, s.n_options_range.second}},
                      {"vocab_size", s.vocab_size},
                      {"irrelevant_span_prob", s.irrelevant_span_prob},
                      {"uncertain_prob", s.uncertain_prob},
                      {"seed", s.seed}};
  } else {
    j["source"] = d.data;
  }
  j["fingerprint"] = hex64(fingerprint(samples));
  j["split_by"] = d.split_by;
  j["split_seed"] = d.data_seed;
  j["max_len"] = d.max_len;
  return j;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

PreparedCorpus prepare_data(const DataOptions& d, std::vector<Sample>& samples, std::ostream& err) {
  samples = load_samples(d);
  PreparedCorpus data = prepare(split(samples, split_spec(d)), d.max_len);
  if (data.truncated_options > 0) {
    err << "note: " << data.truncated_options << " option terms were cut off by truncation to "
        << d.max_len << " tokens\n";
  }
  return data;
}

std::string format_row(const std::string& name, const EvalReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(16) << name << std::right << std::fixed << std::setprecision(4)
     << std::setw(10) << r.accuracy << std::setw(10) << r.macro_f1 << '\n';
  return os.str();
}

/// Runs `body`, mapping library exceptions onto the exit-code contract.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  }
}

Tokens split_tokens(const std::string& text) {
  std::istringstream is(text);
  Tokens out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> column(const ad::Tensor& t) { return {t.values().begin(), t.values().end()}; }

}  // namespace

SyntheticConfig synthetic_config(const DataOptions& d) {
  if (d.synthetic != "default") {
    throw std::invalid_argument("unknown synthetic corpus '" + d.synthetic + "' (expected 'default')");
  }
  SyntheticConfig c;
  c.seed = d.data_seed;
  if (d.noise) {
    if (*d.noise < 0.0 || *d.noise > 1.0) throw std::invalid_argument("--noise must lie in [0, 1]");
    c.irrelevant_span_prob = *d.noise;
  }
  return c;
}

std::vector<Sample> load_samples(const DataOptions& d) {
  if (d.data.empty()) return generate_synthetic(synthetic_config(d));
  return load_corpus(d.data).samples;
}

SplitSpec split_spec(const DataOptions& d) {
  SplitSpec s;
  s.seed = d.data_seed;
  if (d.split_by == "question") {
    s.granularity = SplitGranularity::by_question;
  } else if (d.split_by == "sample") {
    s.granularity = SplitGranularity::by_sample;
  } else {
    throw std::invalid_argument("--split-by must be 'question' or 'sample'");
  }
  return s;
}

int cmd_train(const RunOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const VariantSpec variant = VariantSpec::parse(o.variant);
    o.train.validate();
    std::vector<Sample> samples;
    const PreparedCorpus data = prepare_data(o.data, samples, err);
    Hyper hyper = o.hyper;
    hyper.vocab_size = data.vocab.size();

    ordered_json manifest;
    manifest["command"] = "train";
    manifest["variant"] = variant.name();
    manifest["seed"] = o.train.seed;
    manifest["data"] = data_json(o.data, samples);
    manifest["hyper"] = hyper_json(hyper);
    manifest["train"] = train_json(o.train);
    manifest["embeddings"] = o.embeddings;
    manifest["out"] = o.out;
    const std::string manifest_text = manifest.dump(2) + "\n";
    const std::string run_id = hex64(fnv1a(manifest_text));

    const fs::path dir(o.out);
    fs::create_directories(dir);
    write_file(dir / "manifest.json", manifest_text);

    Model model = Model::build(variant, hyper, o.train.seed);
    if (!o.embeddings.empty()) {
      const std::size_t n = load_pretrained_embeddings(model.params(), model.embedding(), data.vocab, o.embeddings);
      err << "loaded " << n << " pretrained vectors\n";
    }
    err << variant.display_name() << ": " << data.train.size() << " train / " << data.validation.size()
        << " validation / " << data.test.size() << " test samples, vocabulary " << data.vocab.size() << '\n';

    TrainResult result = train(std::move(model), data.train, data.validation, data.cache, o.train);
    std::string history;
    for (const auto& rec : result.history) {
      ordered_json j = ordered_json::parse(rec.record());
      j["run"] = run_id;
      history += j.dump() + "\n";
      err << "epoch " << rec.epoch << "  train_loss " << std::fixed << std::setprecision(4)
          << rec.train_loss << "  val_loss " << rec.val_loss << "  val_acc " << rec.val_acc << '\n';
    }
    write_file(dir / "history.jsonl", history);

    const EvalReport report = evaluate(result.model, data.test, data.cache);
    ordered_json ev = ordered_json::parse(report.record());
    ev["run"] = run_id;
    ev["split"] = "test";
    ev["best_epoch"] = result.best_epoch;
    write_file(dir / "eval.json", ev.dump() + "\n");

    Checkpoint ckpt{result.model, data.vocab, data.cache, data.max_len, run_id};
    save_checkpoint((dir / "checkpoint.json").string(), ckpt);

    out << variant.display_name() << " (best epoch " << result.best_epoch << ")\n" << report.table();
    return static_cast<int>(kOk);
  });
}

int cmd_ablate(const RunOptions& o, const std::vector<std::string>& names, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    std::vector<VariantSpec> variants;
    if (names.empty()) {
      variants = VariantSpec::ablation_grid();
    } else {
      for (const auto& n : names) variants.push_back(VariantSpec::parse(n));
    }
    std::vector<Sample> samples;
    const PreparedCorpus data = prepare_data(o.data, samples, err);
    const fs::path dir(o.out);
    fs::create_directories(dir);

    std::string records;
    out << std::left << std::setw(16) << "variant" << std::right << std::setw(10) << "accuracy"
        << std::setw(10) << "macro-F1" << '\n';
    for (const auto& v : variants) {
      err << "training " << v.display_name() << '\n';
      const ExperimentResult r = run_experiment(v, o.hyper, data, o.train);
      out << format_row(v.display_name(), r.test) << std::flush;
      ordered_json j = ordered_json::parse(r.test.record());
      j["variant"] = v.name();
      j["seed"] = o.train.seed;
      j["fingerprint"] = hex64(fingerprint(samples));
      records += j.dump() + "\n";
    }
    write_file(dir / "ablation.jsonl", records);
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const RunOptions& o, const std::string& param, const std::vector<std::size_t>& values,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SweepParam which;
    if (param == "ne") {
      which = SweepParam::ne;
    } else if (param == "hops") {
      which = SweepParam::hops;
    } else {
      throw std::invalid_argument("--param must be 'ne' or 'hops'");
    }
    const VariantSpec variant = VariantSpec::parse(o.variant);
    std::vector<Sample> samples;
    const PreparedCorpus data = prepare_data(o.data, samples, err);
    const auto rows = sweep(which, values, variant, o.hyper, data, o.train);
    const fs::path dir(o.out);
    fs::create_directories(dir);

    std::string records;
    out << std::left << std::setw(16) << param << std::right << std::setw(10) << "accuracy"
        << std::setw(10) << "macro-F1" << '\n';
    for (const auto& row : rows) {
      out << format_row(std::to_string(row.value), row.report);
      ordered_json j = ordered_json::parse(row.report.record());
      j[param] = row.value;
      j["variant"] = variant.name();
      j["seed"] = o.train.seed;
      records += j.dump() + "\n";
    }
    write_file(dir / "sweep.jsonl", records);
    return static_cast<int>(kOk);
  });
}

int cmd_gradcheck(const GradcheckOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<VariantSpec> variants;
    if (o.variants.empty()) {
      variants = VariantSpec::ablation_grid();
      variants.push_back(VariantSpec::parse("bilstm-a"));
      variants.push_back(VariantSpec::parse("bilstm-qa"));
    } else {
      for (const auto& n : o.variants) variants.push_back(VariantSpec::parse(n));
    }
    const auto samples = toy::batch(o.seed);
    const SkeletonCache cache = SkeletonCache::build(samples);
    if (o.corrupt_backward) ad::testing::set_tanh_backward_factor(1.01);

    double worst = 0.0;
    std::string worst_where;
    out << "epsilon " << o.epsilon << ", tolerance " << o.tolerance << '\n';
    for (const auto& v : variants) {
      Model m = toy::model(v, o.seed + 10, !o.trainable_embeddings);
      const GradCheckReport r = finite_diff_check(m.params(), toy::objective(m, samples, cache), o.epsilon);
      out << std::left << std::setw(16) << v.name() << std::right << std::scientific
          << std::setprecision(3) << r.max_relative_error << "  (" << r.worst_param << ")\n";
      for (const auto& mod : toy::by_module(r)) {
        out << "    " << std::left << std::setw(20) << mod.module << std::right
            << mod.max_relative_error << "  (" << mod.worst_param << ")\n";
      }
      if (r.max_relative_error > worst) {
        worst = r.max_relative_error;
        worst_where = v.name() + " " + r.worst_param;
      }
    }
    ad::testing::set_tanh_backward_factor(1.0);
    out << std::defaultfloat;
    if (worst > o.tolerance) {
      err << "gradient check failed: " << worst << " > " << o.tolerance << " at " << worst_where << '\n';
      return static_cast<int>(kNumericError);
    }
    out << "all variants within tolerance (worst " << worst << ")\n";
    return static_cast<int>(kOk);
  });
}

int cmd_predict(const PredictOptions& o, std::istream& in, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.checkpoint.empty()) throw std::invalid_argument("--checkpoint is required");
    Checkpoint ckpt = load_checkpoint(o.checkpoint);
    std::ofstream dump;
    if (!o.dump.empty()) {
      dump.open(o.dump, std::ios::binary);
      if (!dump) throw DataError("cannot write " + o.dump);
    }
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      const auto fields = split_on(line, '\t');
      if (fields.size() < 2 || fields.size() > 3) {
        throw DataError("line " + std::to_string(lineno) +
                        ": expected question<TAB>answer[<TAB>option | option ...]");
      }
      Sample s;
      s.question_id = "input" + std::to_string(lineno);
      s.answer_id = s.question_id;
      s.question = split_tokens(fields[0]);
      s.answer = split_tokens(fields[1]);
      std::vector<std::optional<Tokens>> options;
      if (fields.size() == 3) {
        for (const auto& opt : split_on(fields[2], '|')) options.emplace_back(split_tokens(opt));
      } else {
        options.emplace_back(std::nullopt);
      }
      for (const auto& opt : options) {
        s.option = opt;
        try {
          validate(s);
        } catch (const DataError& e) {
          throw DataError("line " + std::to_string(lineno) + ": " + e.what());
        }
        const IndexedSample ix = truncate_and_index(s, ckpt.vocab, ckpt.max_len);
        ad::Graph g;
        const Forward f = ckpt.model.forward(g, ix, ckpt.cache.answers(ix.question_id), 0.0);
        const ad::Tensor& p = f.probs.value();
        std::string opt_text = "-";
        if (opt) {
          opt_text.clear();
          for (const auto& t : *opt) opt_text += (opt_text.empty() ? "" : " ") + t;
        }
        out << opt_text << '\t' << to_string(predicted_label(p)) << std::setprecision(6) << std::fixed
            << '\t' << p[0] << '\t' << p[1] << '\t' << p[2] << '\n';
        out << std::defaultfloat;

        if (dump.is_open()) {
          ordered_json j;
          j["line"] = lineno;
          j["option"] = opt ? ordered_json(*opt) : ordered_json(nullptr);
          j["question"] = s.question;
          j["answer"] = s.answer;
          j["label"] = to_string(predicted_label(p));
          j["probs"] = column(p);
          if (f.skeleton) {
            j["skeleton"] = f.skeleton->normalized;
            j["skeleton_member"] = f.skeleton->member;
          }
          if (f.question_attention.valid()) j["question_attention"] = column(f.question_attention.value());
          if (f.relevance.valid()) j["relevance"] = column(f.relevance.value());
          ordered_json hops = ordered_json::object();
          for (const auto& a : f.fusion.full_attention) hops["full"].push_back(column(a.value()));
          for (const auto& a : f.fusion.skeleton_attention) hops["skeleton"].push_back(column(a.value()));
          if (!hops.empty()) j["hop_attention"] = hops;
          dump << j.dump() << '\n';
        }
      }
    }
    return static_cast<int>(kOk);
  });
}

int cmd_stats(const DataOptions& d, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto samples = load_samples(d);
    const CorpusStats st = compute_stats(samples);
    const std::string name = d.data.empty() ? "synthetic" : fs::path(d.data).stem().string();
    out << format_stats_table(st, name) << stats_record(st) << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_generate(const DataOptions& d, const std::string& path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (path.empty()) throw std::invalid_argument("--out is required");
    const auto samples = generate_synthetic(synthetic_config(d));
    save_corpus(path, samples);
    out << "wrote " << samples.size() << " samples to " << path << '\n'
        << format_stats_table(compute_stats(samples), "synthetic");
    return static_cast<int>(kOk);
  });
}

}  // namespace antnet::cli
