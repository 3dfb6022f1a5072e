#include "antnet/checkpoint.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace antnet {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kFormat = "antnet-checkpoint";

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  const Model& m = ckpt.model;
  const Hyper& h = m.hyper();
  ordered_json j;
  j["format"] = kFormat;
  j["version"] = kCheckpointVersion;
  if (!ckpt.manifest.empty()) j["manifest"] = ckpt.manifest;
  j["variant"] = m.variant().name();
  j["hyper"] = {{"vocab_size", h.vocab_size}, {"emb_dim", h.emb_dim},
                {"hidden_dim", h.hidden_dim}, {"ne", h.ne},
                {"hops", h.hops},             {"hop_width", h.hop_width},
                {"share_hops", h.share_hops}, {"freeze_embeddings", h.freeze_embeddings}};
  j["max_len"] = ckpt.max_len;
  j["vocab"] = ckpt.vocab.tokens();

  // Sorted for a byte-stable file.
  std::map<std::string, std::vector<std::vector<std::size_t>>> cache(ckpt.cache.entries().begin(),
                                                                       ckpt.cache.entries().end());
  j["skeleton_cache"] = cache;

  ordered_json params = ordered_json::array();
  for (const auto& p : m.params().all()) {
    params.push_back({{"name", p.name},
                      {"shape", {p.value.rows(), p.value.cols()}},
                      {"trainable", p.trainable},
                      {"data", p.value.storage()}});
  }
  j["params"] = std::move(params);
  return j.dump();
}

Checkpoint parse_checkpoint(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CheckpointError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kFormat) {
    throw CheckpointError("not an antnet checkpoint");
  }
  const int version = j.value("version", -1);
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version) +
                          " (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  try {
    Hyper h;
    const json& jh = j.at("hyper");
    h.vocab_size = jh.at("vocab_size");
    h.emb_dim = jh.at("emb_dim");
    h.hidden_dim = jh.at("hidden_dim");
    h.ne = jh.at("ne");
    h.hops = jh.at("hops");
    h.hop_width = jh.at("hop_width");
    h.share_hops = jh.at("share_hops");
    h.freeze_embeddings = jh.at("freeze_embeddings");

    ParamStore store;
    for (const auto& jp : j.at("params")) {
      const auto shape = jp.at("shape").get<std::vector<std::size_t>>();
      if (shape.size() != 2) throw CheckpointError("parameter shape must have two extents");
      ad::Tensor t(shape[0], shape[1], jp.at("data").get<std::vector<double>>());
      store.add(jp.at("name").get<std::string>(), std::move(t), jp.at("trainable").get<bool>());
    }

    Checkpoint c;
    c.model = Model::attach(VariantSpec::parse(j.at("variant").get<std::string>()), h, std::move(store));
    c.vocab = Vocab(j.at("vocab").get<std::vector<std::string>>());
    c.max_len = j.at("max_len");
    c.manifest = j.value("manifest", "");
    for (const auto& [qid, answers] : j.at("skeleton_cache").items()) {
      c.cache.set(qid, answers.get<std::vector<std::vector<std::size_t>>>());
    }
    if (c.vocab.size() != h.vocab_size) throw CheckpointError("vocabulary size does not match");
    return c;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw CheckpointError(std::string("checkpoint is missing a parameter: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint " + path);
  out << serialize_checkpoint(ckpt) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_checkpoint(buf.str());
}

}  // namespace antnet
