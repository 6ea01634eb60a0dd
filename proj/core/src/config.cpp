#include "qfem/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "qfem/errors.hpp"
#include "qfem/rng.hpp"

namespace qfem {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError("config: " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) bad(where, "unknown key \"" + it.key() + "\"");
  }
}

double get_num(const json& obj, const std::string& where, const char* key,
               double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) bad(where + "." + key, "expected a number");
  return v.get<double>();
}

std::int64_t get_int(const json& obj, const std::string& where,
                     const char* key, std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad(where + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

bool get_bool(const json& obj, const std::string& where, const char* key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) bad(where + "." + key, "expected true or false");
  return v.get<bool>();
}

std::string get_str(const json& obj, const std::string& where,
                    const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) bad(where + "." + key, "expected a string");
  return v.get<std::string>();
}

void parse_frame(const json& obj, fem::FrameConfig& f) {
  check_keys(obj, "frame",
             {"bays", "span", "width", "height", "elastic_modulus",
              "shear_modulus", "area", "inertia_y", "inertia_z",
              "torsion_constant"});
  f.bays = static_cast<int>(get_int(obj, "frame", "bays", f.bays));
  f.span = get_num(obj, "frame", "span", f.span);
  f.width = get_num(obj, "frame", "width", f.width);
  f.height = get_num(obj, "frame", "height", f.height);
  fem::SectionProperties& s = f.section;
  s.elastic_modulus =
      get_num(obj, "frame", "elastic_modulus", s.elastic_modulus);
  s.shear_modulus = get_num(obj, "frame", "shear_modulus", s.shear_modulus);
  s.area = get_num(obj, "frame", "area", s.area);
  s.inertia_y = get_num(obj, "frame", "inertia_y", s.inertia_y);
  s.inertia_z = get_num(obj, "frame", "inertia_z", s.inertia_z);
  s.torsion_constant =
      get_num(obj, "frame", "torsion_constant", s.torsion_constant);
}

void parse_loads(const json& obj, fem::LoadConfig& l) {
  check_keys(obj, "loads",
             {"material_min", "material_max", "wind_speed_max", "wind_cutoff",
              "air_density", "drag_coefficient"});
  l.material_min = get_num(obj, "loads", "material_min", l.material_min);
  l.material_max = get_num(obj, "loads", "material_max", l.material_max);
  l.wind_speed_max = get_num(obj, "loads", "wind_speed_max", l.wind_speed_max);
  l.wind_cutoff = get_num(obj, "loads", "wind_cutoff", l.wind_cutoff);
  l.air_density = get_num(obj, "loads", "air_density", l.air_density);
  l.drag_coefficient =
      get_num(obj, "loads", "drag_coefficient", l.drag_coefficient);
}

}  // namespace

const char* axis_name(qsim::Axis a) {
  switch (a) {
    case qsim::Axis::X:
      return "X";
    case qsim::Axis::Y:
      return "Y";
    case qsim::Axis::Z:
      return "Z";
  }
  throw ConfigError("config: unknown rotation axis value");
}

qsim::Axis axis_from_name(const std::string& s) {
  if (s == "X" || s == "x") return qsim::Axis::X;
  if (s == "Y" || s == "y") return qsim::Axis::Y;
  if (s == "Z" || s == "z") return qsim::Axis::Z;
  throw ConfigError("config: unknown rotation axis \"" + s + "\"");
}

const char* topology_name(qsim::Topology t) {
  return t == qsim::Topology::Ring ? "ring" : "chain";
}

qsim::Topology topology_from_name(const std::string& s) {
  if (s == "ring") return qsim::Topology::Ring;
  if (s == "chain") return qsim::Topology::Chain;
  throw ConfigError("config: unknown entangler topology \"" + s + "\"");
}

const char* term_mode_name(embed::TermMode m) {
  return m == embed::TermMode::kAllUpToDegree ? "all_up_to_degree"
                                             : "exact_degree";
}

embed::TermMode term_mode_from_name(const std::string& s) {
  if (s == "all_up_to_degree") return embed::TermMode::kAllUpToDegree;
  if (s == "exact_degree") return embed::TermMode::kExactDegreeOnly;
  throw ConfigError("config: unknown term mode \"" + s + "\"");
}

const char* placement_name(nn::ClusterPlacement p) {
  return p == nn::ClusterPlacement::Last ? "last" : "penultimate";
}

nn::ClusterPlacement placement_from_name(const std::string& s) {
  if (s == "last") return nn::ClusterPlacement::Last;
  if (s == "penultimate") return nn::ClusterPlacement::Penultimate;
  throw ConfigError("config: unknown cluster placement \"" + s + "\"");
}

ExperimentConfig parse_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) bad("top level", "expected a JSON object");

  ExperimentConfig cfg;
  check_keys(root, "top level",
             {"seed", "out_dir", "threads", "frame", "loads", "data",
              "embedding", "quantum", "model", "train", "clustering"});

  {
    std::int64_t s = get_int(root, "top level", "seed",
                             static_cast<std::int64_t>(cfg.seed));
    if (s < 0) bad("seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  cfg.out_dir = get_str(root, "top level", "out_dir", cfg.out_dir);
  cfg.threads =
      static_cast<int>(get_int(root, "top level", "threads", cfg.threads));

  if (root.contains("frame")) {
    if (!root.at("frame").is_object()) bad("frame", "expected an object");
    parse_frame(root.at("frame"), cfg.frame);
  }
  if (root.contains("loads")) {
    if (!root.at("loads").is_object()) bad("loads", "expected an object");
    parse_loads(root.at("loads"), cfg.loads);
  }

  if (root.contains("data")) {
    const json& d = root.at("data");
    if (!d.is_object()) bad("data", "expected an object");
    check_keys(d, "data", {"samples", "noise_std", "dataset"});
    cfg.samples = static_cast<int>(get_int(d, "data", "samples", cfg.samples));
    cfg.noise_std = get_num(d, "data", "noise_std", cfg.noise_std);
    cfg.dataset_path = get_str(d, "data", "dataset", cfg.dataset_path);
  }

  if (root.contains("embedding")) {
    const json& e = root.at("embedding");
    if (!e.is_object()) bad("embedding", "expected an object");
    check_keys(e, "embedding", {"degree", "terms", "include_bias", "epsilon"});
    cfg.poly.degree =
        static_cast<int>(get_int(e, "embedding", "degree", cfg.poly.degree));
    cfg.poly.terms = term_mode_from_name(
        get_str(e, "embedding", "terms", term_mode_name(cfg.poly.terms)));
    cfg.poly.include_bias =
        get_bool(e, "embedding", "include_bias", cfg.poly.include_bias);
    cfg.epsilon = get_num(e, "embedding", "epsilon", cfg.epsilon);
  }

  if (root.contains("quantum")) {
    const json& q = root.at("quantum");
    if (!q.is_object()) bad("quantum", "expected an object");
    check_keys(q, "quantum", {"qubits", "layers", "axes", "topology", "shots"});
    cfg.qubits = static_cast<int>(get_int(q, "quantum", "qubits", cfg.qubits));
    cfg.circuit_layers = static_cast<int>(
        get_int(q, "quantum", "layers", cfg.circuit_layers));
    if (q.contains("axes")) {
      const json& ax = q.at("axes");
      if (!ax.is_array() || ax.empty())
        bad("quantum.axes", "expected a non-empty array of axis names");
      cfg.axes.clear();
      for (const json& a : ax) {
        if (!a.is_string()) bad("quantum.axes", "expected axis names");
        cfg.axes.push_back(axis_from_name(a.get<std::string>()));
      }
    }
    cfg.topology = topology_from_name(
        get_str(q, "quantum", "topology", topology_name(cfg.topology)));
    cfg.shots = static_cast<int>(get_int(q, "quantum", "shots", cfg.shots));
  }

  if (root.contains("model")) {
    const json& m = root.at("model");
    if (!m.is_object()) bad("model", "expected an object");
    check_keys(m, "model",
               {"variants", "hidden", "cluster_k", "cluster_placement"});
    if (m.contains("variants")) {
      const json& vs = m.at("variants");
      if (!vs.is_array() || vs.empty())
        bad("model.variants", "expected a non-empty array of variant names");
      cfg.variants.clear();
      for (const json& v : vs) {
        if (!v.is_string()) bad("model.variants", "expected variant names");
        cfg.variants.push_back(nn::variant_from_name(v.get<std::string>()));
      }
    }
    if (m.contains("hidden")) {
      const json& h = m.at("hidden");
      if (!h.is_array() || h.empty())
        bad("model.hidden", "expected a non-empty array of layer widths");
      cfg.hidden.clear();
      for (const json& w : h) {
        if (!w.is_number_integer())
          bad("model.hidden", "expected integer widths");
        cfg.hidden.push_back(w.get<int>());
      }
    }
    cfg.cluster_k =
        static_cast<int>(get_int(m, "model", "cluster_k", cfg.cluster_k));
    cfg.cluster_placement = placement_from_name(get_str(
        m, "model", "cluster_placement", placement_name(cfg.cluster_placement)));
  }

  if (root.contains("train")) {
    const json& t = root.at("train");
    if (!t.is_object()) bad("train", "expected an object");
    check_keys(t, "train",
               {"learning_rate", "beta1", "beta2", "adam_epsilon", "l2",
                "batch_size", "max_epochs", "patience", "min_delta",
                "validation_fraction", "test_fraction"});
    nn::TrainConfig& tc = cfg.train;
    tc.learning_rate = get_num(t, "train", "learning_rate", tc.learning_rate);
    tc.beta1 = get_num(t, "train", "beta1", tc.beta1);
    tc.beta2 = get_num(t, "train", "beta2", tc.beta2);
    tc.adam_epsilon = get_num(t, "train", "adam_epsilon", tc.adam_epsilon);
    tc.l2 = get_num(t, "train", "l2", tc.l2);
    tc.batch_size =
        static_cast<int>(get_int(t, "train", "batch_size", tc.batch_size));
    tc.max_epochs =
        static_cast<int>(get_int(t, "train", "max_epochs", tc.max_epochs));
    tc.patience =
        static_cast<int>(get_int(t, "train", "patience", tc.patience));
    tc.min_delta = get_num(t, "train", "min_delta", tc.min_delta);
    tc.validation_fraction =
        get_num(t, "train", "validation_fraction", tc.validation_fraction);
    tc.test_fraction =
        get_num(t, "train", "test_fraction", tc.test_fraction);
  }

  if (root.contains("clustering")) {
    const json& c = root.at("clustering");
    if (!c.is_object()) bad("clustering", "expected an object");
    check_keys(c, "clustering",
               {"k_min", "k_max", "restarts", "max_iter", "tol",
                "sweep_epochs"});
    cfg.k_min = static_cast<int>(get_int(c, "clustering", "k_min", cfg.k_min));
    cfg.k_max = static_cast<int>(get_int(c, "clustering", "k_max", cfg.k_max));
    cfg.cluster_restarts = static_cast<int>(
        get_int(c, "clustering", "restarts", cfg.cluster_restarts));
    cfg.cluster_max_iter = static_cast<int>(
        get_int(c, "clustering", "max_iter", cfg.cluster_max_iter));
    cfg.cluster_tol = get_num(c, "clustering", "tol", cfg.cluster_tol);
    cfg.sweep_epochs = static_cast<int>(
        get_int(c, "clustering", "sweep_epochs", cfg.sweep_epochs));
  }

  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

void validate_config(const ExperimentConfig& cfg) {
  const fem::FrameConfig& f = cfg.frame;
  if (f.bays < 1) bad("frame.bays", "must be at least 1");
  if (f.span <= 0.0 || f.width <= 0.0 || f.height <= 0.0)
    bad("frame", "span, width and height must be positive");
  if (f.section.elastic_modulus <= 0.0 || f.section.shear_modulus <= 0.0)
    bad("frame", "elastic and shear moduli must be positive");
  if (f.section.area <= 0.0 || f.section.inertia_y <= 0.0 ||
      f.section.inertia_z <= 0.0 || f.section.torsion_constant <= 0.0)
    bad("frame", "section properties must be positive");

  const fem::LoadConfig& l = cfg.loads;
  if (l.material_min < 0.0 || l.material_max < l.material_min)
    bad("loads", "need 0 <= material_min <= material_max");
  if (l.wind_speed_max < 0.0) bad("loads.wind_speed_max", "must be >= 0");
  if (l.wind_cutoff < 0.0) bad("loads.wind_cutoff", "must be >= 0");
  if (l.air_density <= 0.0) bad("loads.air_density", "must be positive");
  if (l.drag_coefficient <= 0.0)
    bad("loads.drag_coefficient", "must be positive");

  if (cfg.samples < 1) bad("data.samples", "must be at least 1");
  if (cfg.noise_std < 0.0) bad("data.noise_std", "must be >= 0");
  if (cfg.threads < 0) bad("threads", "must be >= 0");

  if (cfg.poly.degree < 1 || cfg.poly.degree > 3)
    bad("embedding.degree", "supported degrees are 1, 2 and 3");
  if (cfg.epsilon <= 0.0) bad("embedding.epsilon", "must be positive");

  if (cfg.qubits < 1) bad("quantum.qubits", "must be at least 1");
  if (cfg.qubits > qsim::kMaxQubits)
    bad("quantum.qubits",
        "at most " + std::to_string(qsim::kMaxQubits) + " qubits");
  if (cfg.circuit_layers < 1) bad("quantum.layers", "must be at least 1");
  if (cfg.shots < 0) bad("quantum.shots", "must be >= 0");

  if (cfg.variants.empty()) bad("model.variants", "must not be empty");
  for (int w : cfg.hidden)
    if (w < 1) bad("model.hidden", "layer widths must be positive");
  if (cfg.hidden.size() < 2)
    bad("model.hidden", "need at least two hidden widths");
  if (cfg.cluster_k < 1) bad("model.cluster_k", "must be at least 1");

  const nn::TrainConfig& t = cfg.train;
  if (t.learning_rate <= 0.0) bad("train.learning_rate", "must be positive");
  if (t.beta1 < 0.0 || t.beta1 >= 1.0) bad("train.beta1", "must be in [0,1)");
  if (t.beta2 < 0.0 || t.beta2 >= 1.0) bad("train.beta2", "must be in [0,1)");
  if (t.adam_epsilon <= 0.0) bad("train.adam_epsilon", "must be positive");
  if (t.l2 < 0.0) bad("train.l2", "must be >= 0");
  if (t.batch_size < 1) bad("train.batch_size", "must be at least 1");
  if (t.max_epochs < 1) bad("train.max_epochs", "must be at least 1");
  if (t.patience < 1) bad("train.patience", "must be at least 1");
  if (t.min_delta < 0.0) bad("train.min_delta", "must be >= 0");
  if (t.validation_fraction <= 0.0 || t.test_fraction < 0.0 ||
      t.validation_fraction + t.test_fraction >= 1.0)
    bad("train", "need validation_fraction > 0, test_fraction >= 0 and "
                 "validation_fraction + test_fraction < 1");

  if (cfg.k_min < 2) bad("clustering.k_min", "must be at least 2");
  if (cfg.k_max < cfg.k_min) bad("clustering.k_max", "must be >= k_min");
  if (cfg.cluster_restarts < 1)
    bad("clustering.restarts", "must be at least 1");
  if (cfg.cluster_max_iter < 1)
    bad("clustering.max_iter", "must be at least 1");
  if (cfg.cluster_tol < 0.0) bad("clustering.tol", "must be >= 0");
  if (cfg.sweep_epochs < 1) bad("clustering.sweep_epochs", "must be at least 1");

  // Cross-field checks that need derived dimensions. The sensor count is
  // fixed by the frame layout.
  const int sensors =
      static_cast<int>(fem::default_sensor_spec(cfg.frame).channels.size());
  for (nn::Variant v : cfg.variants) {
    if (v == nn::Variant::PolySPD_Clustered) {
      const std::size_t d = embed::expanded_dim(sensors, cfg.poly);
      if (static_cast<std::size_t>(cfg.qubits) > d)
        bad("quantum.qubits",
            "variant " + std::string(nn::variant_name(v)) + " needs qubits <= " +
                std::to_string(d) + " (embedded dimension)");
    }
    if (v == nn::Variant::PolySPD_HC_Clustered) {
      const std::size_t d = embed::expanded_dim(sensors, cfg.poly);
      const int n = nn::qubits_for_embedded_dim(d * d);
      if (n > qsim::kMaxQubits)
        bad("embedding",
            "variant " + std::string(nn::variant_name(v)) + " needs " +
                std::to_string(n) + " qubits for a " + std::to_string(d) +
                "-dim embedding; at most " + std::to_string(qsim::kMaxQubits) +
                " supported. Reduce the polynomial degree.");
    }
    if (v == nn::Variant::QuantumClassical && sensors > qsim::kMaxQubits)
      bad("frame",
          "variant " + std::string(nn::variant_name(v)) +
              " angle-embeds one sensor per qubit; " + std::to_string(sensors) +
              " sensors exceed the " + std::to_string(qsim::kMaxQubits) +
              "-qubit limit");
  }
}

std::string dump_config(const ExperimentConfig& cfg) {
  json root;
  root["seed"] = cfg.seed;
  root["out_dir"] = cfg.out_dir;
  root["threads"] = cfg.threads;

  json& f = root["frame"];
  f["bays"] = cfg.frame.bays;
  f["span"] = cfg.frame.span;
  f["width"] = cfg.frame.width;
  f["height"] = cfg.frame.height;
  f["elastic_modulus"] = cfg.frame.section.elastic_modulus;
  f["shear_modulus"] = cfg.frame.section.shear_modulus;
  f["area"] = cfg.frame.section.area;
  f["inertia_y"] = cfg.frame.section.inertia_y;
  f["inertia_z"] = cfg.frame.section.inertia_z;
  f["torsion_constant"] = cfg.frame.section.torsion_constant;

  json& l = root["loads"];
  l["material_min"] = cfg.loads.material_min;
  l["material_max"] = cfg.loads.material_max;
  l["wind_speed_max"] = cfg.loads.wind_speed_max;
  l["wind_cutoff"] = cfg.loads.wind_cutoff;
  l["air_density"] = cfg.loads.air_density;
  l["drag_coefficient"] = cfg.loads.drag_coefficient;

  json& d = root["data"];
  d["samples"] = cfg.samples;
  d["noise_std"] = cfg.noise_std;
  d["dataset"] = cfg.dataset_path;

  json& e = root["embedding"];
  e["degree"] = cfg.poly.degree;
  e["terms"] = term_mode_name(cfg.poly.terms);
  e["include_bias"] = cfg.poly.include_bias;
  e["epsilon"] = cfg.epsilon;

  json& q = root["quantum"];
  q["qubits"] = cfg.qubits;
  q["layers"] = cfg.circuit_layers;
  q["axes"] = json::array();
  for (qsim::Axis a : cfg.axes) q["axes"].push_back(axis_name(a));
  q["topology"] = topology_name(cfg.topology);
  q["shots"] = cfg.shots;

  json& m = root["model"];
  m["variants"] = json::array();
  for (nn::Variant v : cfg.variants) m["variants"].push_back(nn::variant_name(v));
  m["hidden"] = cfg.hidden;
  m["cluster_k"] = cfg.cluster_k;
  m["cluster_placement"] = placement_name(cfg.cluster_placement);

  json& t = root["train"];
  t["learning_rate"] = cfg.train.learning_rate;
  t["beta1"] = cfg.train.beta1;
  t["beta2"] = cfg.train.beta2;
  t["adam_epsilon"] = cfg.train.adam_epsilon;
  t["l2"] = cfg.train.l2;
  t["batch_size"] = cfg.train.batch_size;
  t["max_epochs"] = cfg.train.max_epochs;
  t["patience"] = cfg.train.patience;
  t["min_delta"] = cfg.train.min_delta;
  t["validation_fraction"] = cfg.train.validation_fraction;
  t["test_fraction"] = cfg.train.test_fraction;

  json& c = root["clustering"];
  c["k_min"] = cfg.k_min;
  c["k_max"] = cfg.k_max;
  c["restarts"] = cfg.cluster_restarts;
  c["max_iter"] = cfg.cluster_max_iter;
  c["tol"] = cfg.cluster_tol;
  c["sweep_epochs"] = cfg.sweep_epochs;

  return root.dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = dump_config(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace qfem
