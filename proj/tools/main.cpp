#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using namespace antnet;
using namespace antnet::cli;

void add_data_flags(CLI::App* cmd, DataOptions& d) {
  cmd->add_option("--data", d.data, "JSONL corpus; omit to use the synthetic corpus");
  cmd->add_option("--synthetic", d.synthetic, "Synthetic corpus preset")->check(CLI::IsMember({"default"}));
  cmd->add_option_function<double>(
         "--noise", [&d](const double& p) { d.noise = p; },
         "Irrelevant-span probability of the synthetic corpus")
      ->default_str(std::to_string(SyntheticConfig{}.irrelevant_span_prob))
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--data-seed", d.data_seed, "Seed of synthetic generation and of the split");
  cmd->add_option("--split-by", d.split_by, "Split granularity")->check(CLI::IsMember({"question", "sample"}));
  cmd->add_option("--max-len", d.max_len, "Token limit for questions, answers and options")
      ->check(CLI::PositiveNumber);
}

void add_model_flags(CLI::App* cmd, Hyper& h) {
  cmd->add_option("--emb-dim", h.emb_dim, "Word embedding size")->check(CLI::PositiveNumber);
  cmd->add_option("--hidden-dim", h.hidden_dim, "BiLSTM state size d (both directions)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--ne", h.ne, "Relevance replication count N_e")->check(CLI::PositiveNumber);
  cmd->add_option("--hops", h.hops, "Fusion hops T");
  cmd->add_option("--hop-width", h.hop_width, "Hop hidden width r; 0 means r = d");
  cmd->add_flag("--share-hops", h.share_hops, "Share parameters across hops");
  cmd->add_flag_callback(
      "--trainable-embeddings", [&h] { h.freeze_embeddings = false; },
      "Update word embeddings during training");
}

void add_train_flags(CLI::App* cmd, TrainConfig& t) {
  cmd->add_option("--lr", t.learning_rate, "Adam learning rate");
  cmd->add_option("--dropout", t.dropout, "Dropout probability")->check(CLI::Range(0.0, 0.999));
  cmd->add_option("--epochs", t.max_epochs, "Maximum epochs")->check(CLI::PositiveNumber);
  cmd->add_option("--batch-size", t.batch_size, "Samples per update")->check(CLI::PositiveNumber);
  cmd->add_option("--patience", t.patience, "Epochs without validation gain before stopping; 0 disables");
  cmd->add_option("--seed", t.seed, "Seed of initialization, shuffling and dropout");
}

void add_run_flags(CLI::App* cmd, RunOptions& o) {
  add_data_flags(cmd, o.data);
  add_model_flags(cmd, o.hyper);
  add_train_flags(cmd, o.train);
  cmd->add_option("--out", o.out, "Output directory for artifacts");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AntNet answer-aware question classification"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  RunOptions run;
  CLI::App* train = app.add_subcommand("train", "Train one variant and evaluate it on the test split");
  add_run_flags(train, run);
  train->add_option("--variant", run.variant, "Model variant");
  train->add_option("--embeddings", run.embeddings, "Pretrained vectors in word2vec text format");

  RunOptions ablate_run;
  std::vector<std::string> ablate_variants;
  CLI::App* ablate = app.add_subcommand("ablate", "Train every variant on one split and tabulate");
  add_run_flags(ablate, ablate_run);
  ablate->add_option("--variants", ablate_variants, "Comma-separated variants (default: all seven AntNet variants)")
      ->delimiter(',');

  RunOptions sweep_run;
  std::string sweep_param = "ne";
  std::vector<std::size_t> sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "Train one variant per value of N_e or T");
  add_run_flags(sweep, sweep_run);
  sweep->add_option("--variant", sweep_run.variant, "Model variant");
  sweep->add_option("--param", sweep_param, "Swept hyperparameter")->check(CLI::IsMember({"ne", "hops"}));
  sweep->add_option("--values", sweep_values, "Comma-separated values")->delimiter(',')->required();

  GradcheckOptions gc;
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check on the built-in toy fixture");
  gradcheck->add_option("--epsilon", gc.epsilon, "Central-difference step")->check(CLI::Range(1e-7, 1e-3));
  gradcheck->add_option("--tolerance", gc.tolerance, "Largest accepted relative error");
  gradcheck->add_option("--seed", gc.seed, "Fixture seed");
  gradcheck->add_option("--variants", gc.variants, "Comma-separated variants (default: all)")->delimiter(',');
  gradcheck->add_flag("--trainable-embeddings", gc.trainable_embeddings, "Also check the embedding table");
  gradcheck->add_flag("--corrupt-backward", gc.corrupt_backward, "Perturb the tanh derivative")
      ->group("");

  PredictOptions pred;
  CLI::App* predict = app.add_subcommand(
      "predict", "Classify question<TAB>answer[<TAB>opt | opt ...] lines read from stdin");
  predict->add_option("--checkpoint", pred.checkpoint, "Checkpoint written by train")->required();
  predict->add_option("--dump", pred.dump, "Write attention and relevance as JSONL to this file");

  DataOptions stats_data;
  CLI::App* stats = app.add_subcommand("stats", "Corpus statistics");
  add_data_flags(stats, stats_data);

  DataOptions gen_data;
  std::string gen_out;
  CLI::App* generate = app.add_subcommand("generate", "Write the synthetic corpus as JSONL");
  add_data_flags(generate, gen_data);
  generate->add_option("--out", gen_out, "Destination file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*train) return cmd_train(run, std::cout, std::cerr);
  if (*ablate) return cmd_ablate(ablate_run, ablate_variants, std::cout, std::cerr);
  if (*sweep) return cmd_sweep(sweep_run, sweep_param, sweep_values, std::cout, std::cerr);
  if (*gradcheck) return cmd_gradcheck(gc, std::cout, std::cerr);
  if (*predict) return cmd_predict(pred, std::cin, std::cout, std::cerr);
  if (*stats) return cmd_stats(stats_data, std::cout, std::cerr);
  if (*generate) return cmd_generate(gen_data, gen_out, std::cout, std::cerr);
  return kUsage;
}
