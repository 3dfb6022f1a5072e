#ifndef ANTNET_TOOLS_COMMANDS_HPP_
#define ANTNET_TOOLS_COMMANDS_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "antnet/corpus.hpp"
#include "antnet/model.hpp"
#include "antnet/toy.hpp"
#include "antnet/training.hpp"

namespace antnet::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumericError = 3 };

/// Where samples come from and how they are split and truncated.
struct DataOptions {
  std::string data;                 // JSONL corpus; empty selects the synthetic corpus
  std::string synthetic = "default";
  std::optional<double> noise;      // irrelevant-span probability override
  std::uint64_t data_seed = 7;      // synthetic generation and split
  std::string split_by = "question";
  std::size_t max_len = kDefaultMaxLen;
};

struct RunOptions {
  DataOptions data;
  Hyper hyper;
  TrainConfig train;
  std::string variant = "antnet";
  std::string out = "run";
  std::string embeddings;  // optional pretrained vectors
};

/// Trains one variant and writes manifest.json, history.jsonl, eval.json and
/// checkpoint.json under options.out.
int cmd_train(const RunOptions& options, std::ostream& out, std::ostream& err);

/// One row per variant on a shared split and seed; also writes ablation.jsonl.
int cmd_ablate(const RunOptions& options, const std::vector<std::string>& variants,
               std::ostream& out, std::ostream& err);

/// One train+eval per value of N_e or T; also writes sweep.jsonl.
int cmd_sweep(const RunOptions& options, const std::string& param,
              const std::vector<std::size_t>& values, std::ostream& out, std::ostream& err);

struct GradcheckOptions {
  double epsilon = toy::kEpsilon;
  double tolerance = toy::kTolerance;
  std::uint64_t seed = 1;
  std::vector<std::string> variants;  // empty means every variant
  bool trainable_embeddings = false;
  bool corrupt_backward = false;      // negative control
};

/// Per-module worst relative error on the toy fixture; exits 3 when any
/// exceeds the tolerance.
int cmd_gradcheck(const GradcheckOptions& options, std::ostream& out, std::ostream& err);

struct PredictOptions {
  std::string checkpoint;
  std::string dump;  // optional JSONL with attention and relevance
};

/// Reads "question<TAB>answer[<TAB>opt1 | opt2 ...]" lines and writes one
/// "option<TAB>label<TAB>p_true<TAB>p_false<TAB>p_uncertain" line per option.
int cmd_predict(const PredictOptions& options, std::istream& in, std::ostream& out,
                std::ostream& err);

int cmd_stats(const DataOptions& options, std::ostream& out, std::ostream& err);

/// Writes the synthetic corpus selected by `options` to `path`.
int cmd_generate(const DataOptions& options, const std::string& path, std::ostream& out,
                 std::ostream& err);

/// Loaded or generated samples for `options`.
std::vector<Sample> load_samples(const DataOptions& options);
SplitSpec split_spec(const DataOptions& options);
SyntheticConfig synthetic_config(const DataOptions& options);

}  // namespace antnet::cli

#endif  // ANTNET_TOOLS_COMMANDS_HPP_
