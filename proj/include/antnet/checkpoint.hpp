#ifndef ANTNET_CHECKPOINT_HPP_
#define ANTNET_CHECKPOINT_HPP_

#include <string>

#include "antnet/model.hpp"
#include "antnet/training.hpp"
#include "antnet/vocab.hpp"

namespace antnet {

inline constexpr int kCheckpointVersion = 1;

/// Everything needed to rebuild a trained model for evaluation or prediction.
struct Checkpoint {
  Model model;
  Vocab vocab;
  SkeletonCache cache;
  std::size_t max_len = kDefaultMaxLen;
  std::string manifest;  // id of the run that produced it; optional
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON container: format tag, version, variant, hyperparameters, vocabulary,
/// skeleton cache and every parameter as {name, shape, trainable, data}.
/// Doubles are written in shortest round-trip form, so load(save(x)) is
/// bit-exact.
std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::string& text);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
/// Throws CheckpointError on an unknown format or version.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace antnet

#endif  // ANTNET_CHECKPOINT_HPP_
