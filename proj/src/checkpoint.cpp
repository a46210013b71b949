#include "loop_lc/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <sodium.h>

namespace loop_lc {

static_assert(std::endian::native == std::endian::little, "checkpoint blobs assume a little-endian host");

namespace {

void ensure_sodium() {
  if (sodium_init() < 0) throw Error("libsodium initialisation failed");
}

std::string encode(const double* data, Index count) {
  ensure_sodium();
  const size_t bytes = static_cast<size_t>(count) * sizeof(double);
  std::string out(sodium_base64_encoded_len(bytes, sodium_base64_VARIANT_ORIGINAL), '\0');
  sodium_bin2base64(out.data(), out.size(), reinterpret_cast<const unsigned char*>(data), bytes,
                    sodium_base64_VARIANT_ORIGINAL);
  out.resize(std::strlen(out.c_str()));
  return out;
}

void decode(const std::string& text, double* data, Index count, const std::string& what) {
  ensure_sodium();
  const size_t bytes = static_cast<size_t>(count) * sizeof(double);
  std::vector<unsigned char> buf(text.size());
  size_t got = 0;
  if (sodium_base642bin(buf.data(), buf.size(), text.c_str(), text.size(), nullptr, &got, nullptr,
                        sodium_base64_VARIANT_ORIGINAL) != 0)
    throw CheckpointError("checkpoint: " + what + " is not valid base64");
  if (got != bytes) {
    std::ostringstream os;
    os << "checkpoint: " << what << " holds " << got << " bytes, expected " << bytes;
    throw CheckpointError(os.str());
  }
  std::memcpy(data, buf.data(), bytes);
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw CheckpointError(std::string("checkpoint: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint: field '") + key + "': " + e.what());
  }
}

}  // namespace

json checkpoint_to_json(const Checkpoint& ckpt) {
  const MlpModel& m = ckpt.model;
  json layers = json::array();
  for (Index l = 0; l < m.num_layers(); ++l) {
    const Mat& w = m.parameters().weights[static_cast<size_t>(l)];
    const Vec& b = m.parameters().biases[static_cast<size_t>(l)];
    layers.push_back({{"weights", encode(w.data(), w.size())}, {"biases", encode(b.data(), b.size())}});
  }
  json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["layer_dims"] = m.layer_dims();
  j["output_activation"] = to_string(m.output_activation());
  j["input_shift"] = encode(m.input_shift().data(), m.input_shift().size());
  j["input_scale"] = encode(m.input_scale().data(), m.input_scale().size());
  j["layers"] = layers;
  j["metadata"] = {{"problem_hash", ckpt.meta.problem_hash},
                   {"epoch", ckpt.meta.epoch},
                   {"loss_history", ckpt.meta.loss_history},
                   {"training_mode", ckpt.meta.training_mode},
                   {"interior_method", ckpt.meta.interior_method}};
  if (ckpt.problem) j["problem"] = *ckpt.problem;
  return j;
}

Checkpoint checkpoint_from_json(const json& j, const std::string& expected_hash) {
  if (!j.is_object()) throw CheckpointError("checkpoint: document is not an object");
  if (field<std::string>(j, "format") != kCheckpointFormat) throw CheckpointError("checkpoint: unknown format tag");
  const int version = field<int>(j, "version");
  if (version != kCheckpointVersion) {
    std::ostringstream os;
    os << "checkpoint: version " << version << " is not supported (expected " << kCheckpointVersion << ")";
    throw CheckpointError(os.str());
  }
  const auto dims = field<std::vector<Index>>(j, "layer_dims");
  Checkpoint ckpt;
  try {
    ckpt.model = MlpModel::zeros(dims, output_activation_from_string(field<std::string>(j, "output_activation")));
  } catch (const CheckpointError&) {
    throw;
  } catch (const Error& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }
  const json layers = field<json>(j, "layers");
  if (!layers.is_array() || static_cast<Index>(layers.size()) != ckpt.model.num_layers())
    throw CheckpointError("checkpoint: layer count does not match layer_dims");
  for (size_t l = 0; l < layers.size(); ++l) {
    Mat& w = ckpt.model.parameters().weights[l];
    Vec& b = ckpt.model.parameters().biases[l];
    decode(field<std::string>(layers[l], "weights"), w.data(), w.size(), "weights of layer " + std::to_string(l));
    decode(field<std::string>(layers[l], "biases"), b.data(), b.size(), "biases of layer " + std::to_string(l));
  }
  Vec shift(ckpt.model.input_dim()), scale(ckpt.model.input_dim());
  decode(field<std::string>(j, "input_shift"), shift.data(), shift.size(), "input_shift");
  decode(field<std::string>(j, "input_scale"), scale.data(), scale.size(), "input_scale");
  try {
    ckpt.model.set_input_normalization(shift, scale);
  } catch (const Error& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }

  const json meta = field<json>(j, "metadata");
  ckpt.meta.problem_hash = field<std::string>(meta, "problem_hash");
  ckpt.meta.epoch = field<int>(meta, "epoch");
  ckpt.meta.loss_history = field<std::vector<double>>(meta, "loss_history");
  ckpt.meta.training_mode = meta.value("training_mode", "");
  ckpt.meta.interior_method = meta.value("interior_method", "lp");
  if (j.contains("problem")) ckpt.problem = j.at("problem");

  if (!expected_hash.empty() && expected_hash != ckpt.meta.problem_hash)
    ckpt.warnings.push_back("checkpoint was trained on problem " + ckpt.meta.problem_hash +
                            " but is being used with problem " + expected_hash);
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  save_json(path, checkpoint_to_json(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const std::string& expected_hash) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("checkpoint: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CheckpointError("checkpoint: " + path.string() + " is corrupt: " + e.what());
  }
  return checkpoint_from_json(j, expected_hash);
}

}  // namespace loop_lc
