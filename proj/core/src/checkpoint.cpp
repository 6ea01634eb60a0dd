#include "qfem/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qfem/config.hpp"
#include "qfem/errors.hpp"
#include "qfem/rng.hpp"

namespace qfem {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "qfem-checkpoint";
constexpr int kVersion = 1;

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

Vec vec_from_json(const json& arr, const char* what) {
  if (!arr.is_array())
    throw DataError(std::string("checkpoint: ") + what + ": expected an array");
  Vec v;
  v.reserve(arr.size());
  for (const json& x : arr) {
    if (!x.is_number())
      throw DataError(std::string("checkpoint: ") + what +
                      ": expected numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

json standardizer_to_json(const Standardizer& s) {
  json obj;
  obj["mean"] = vec_to_json(s.mean);
  obj["scale"] = vec_to_json(s.scale);
  return obj;
}

Standardizer standardizer_from_json(const json& obj, const char* what) {
  if (!obj.is_object())
    throw DataError(std::string("checkpoint: ") + what +
                    ": expected an object");
  Standardizer s;
  s.mean = vec_from_json(obj.at("mean"), what);
  s.scale = vec_from_json(obj.at("scale"), what);
  if (s.mean.size() != s.scale.size())
    throw DataError(std::string("checkpoint: ") + what +
                    ": mean/scale length mismatch");
  return s;
}

template <typename T>
T require(const json& obj, const char* key) {
  if (!obj.contains(key))
    throw DataError(std::string("checkpoint: missing key \"") + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string("checkpoint: key \"") + key +
                    "\" has the wrong type");
  }
}

}  // namespace

std::string checkpoint_to_json(const nn::HybridModel& model,
                               const CheckpointMeta& meta) {
  const nn::VariantSpec& sp = model.spec;
  json root;
  root["format"] = kFormat;
  root["version"] = kVersion;
  root["seed"] = meta.seed;
  root["config_hash"] = meta.config_hash;
  root["epochs_trained"] = meta.epochs_trained;
  root["best_val_loss"] = meta.best_val_loss;

  json& a = root["architecture"];
  a["variant"] = nn::variant_name(sp.variant);
  a["sensor_dim"] = sp.sensor_dim;
  a["output_dim"] = sp.output_dim;
  a["hidden"] = sp.hidden;
  a["cluster_k"] = sp.cluster_k;
  a["cluster_placement"] = placement_name(sp.cluster_placement);
  a["embedding_degree"] = sp.poly.degree;
  a["embedding_terms"] = term_mode_name(sp.poly.terms);
  a["embedding_bias"] = sp.poly.include_bias;
  a["epsilon"] = sp.epsilon;
  a["qubits"] = sp.qubits;
  a["layers"] = sp.layers;
  json axes = json::array();
  for (qsim::Axis ax : sp.axes) axes.push_back(axis_name(ax));
  a["axes"] = axes;
  a["topology"] = topology_name(sp.topology);

  root["input_standardizer"] = standardizer_to_json(model.input_std);
  root["target_standardizer"] = standardizer_to_json(model.target_std);
  root["params"] = vec_to_json(model.get_params());
  return root.dump(2) + "\n";
}

nn::HybridModel checkpoint_from_json(const std::string& text,
                                     CheckpointMeta* meta) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw DataError("checkpoint: expected a JSON object");
  if (require<std::string>(root, "format") != kFormat)
    throw DataError("checkpoint: unrecognized format tag");
  if (require<int>(root, "version") != kVersion)
    throw DataError("checkpoint: unsupported version");

  if (!root.contains("architecture") || !root.at("architecture").is_object())
    throw DataError("checkpoint: missing architecture block");
  const json& a = root.at("architecture");

  nn::VariantSpec sp;
  sp.variant = nn::variant_from_name(require<std::string>(a, "variant"));
  sp.sensor_dim = require<int>(a, "sensor_dim");
  sp.output_dim = require<int>(a, "output_dim");
  sp.hidden = require<std::vector<int>>(a, "hidden");
  sp.cluster_k = require<int>(a, "cluster_k");
  sp.cluster_placement =
      placement_from_name(require<std::string>(a, "cluster_placement"));
  sp.poly.degree = require<int>(a, "embedding_degree");
  sp.poly.terms = term_mode_from_name(require<std::string>(a, "embedding_terms"));
  sp.poly.include_bias = require<bool>(a, "embedding_bias");
  sp.epsilon = require<double>(a, "epsilon");
  sp.qubits = require<int>(a, "qubits");
  sp.layers = require<int>(a, "layers");
  sp.axes.clear();
  for (const std::string& s : require<std::vector<std::string>>(a, "axes"))
    sp.axes.push_back(axis_from_name(s));
  sp.topology = topology_from_name(require<std::string>(a, "topology"));

  Rng shell_rng(0);  // weights are overwritten below
  nn::HybridModel model = nn::build_variant(sp, shell_rng);

  model.input_std = standardizer_from_json(root.at("input_standardizer"),
                                           "input_standardizer");
  model.target_std = standardizer_from_json(root.at("target_standardizer"),
                                            "target_standardizer");
  if (model.input_std.mean.size() != static_cast<std::size_t>(sp.sensor_dim))
    throw DataError("checkpoint: input standardizer does not match sensor_dim");
  if (model.target_std.mean.size() != static_cast<std::size_t>(sp.output_dim))
    throw DataError("checkpoint: target standardizer does not match output_dim");

  Vec params = vec_from_json(root.at("params"), "params");
  if (params.size() != model.param_count()) {
    std::ostringstream msg;
    msg << "checkpoint: expected " << model.param_count() << " parameters, got "
        << params.size();
    throw DataError(msg.str());
  }
  model.set_params(params);

  if (meta) {
    meta->seed = require<std::uint64_t>(root, "seed");
    meta->config_hash = require<std::uint64_t>(root, "config_hash");
    meta->epochs_trained = require<int>(root, "epochs_trained");
    meta->best_val_loss = require<double>(root, "best_val_loss");
  }
  return model;
}

void save_checkpoint(const nn::HybridModel& model, const CheckpointMeta& meta,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("checkpoint: cannot open " + path + " for writing");
  out << checkpoint_to_json(model, meta);
  if (!out) throw DataError("checkpoint: write failed for " + path);
}

nn::HybridModel load_checkpoint(const std::string& path,
                                CheckpointMeta* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checkpoint: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_json(buf.str(), meta);
}

}  // namespace qfem
