#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qfem/clustering.hpp"
#include "qfem/femgen.hpp"
#include "qfem/model.hpp"

namespace qfem {

// Everything an experiment run needs, resolved to concrete values.
// Parsed from JSON with unknown-key rejection; dump_config() writes the
// effective form back out so runs are reproducible from their artifacts.
struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  int threads = 0;

  fem::FrameConfig frame;
  fem::LoadConfig loads;
  int samples = 2000;
  double noise_std = 0.0;
  std::string dataset_path = "dataset.csv";

  embed::PolyConfig poly;
  double epsilon = 1e-6;

  int qubits = 8;
  int circuit_layers = 2;
  std::vector<qsim::Axis> axes{qsim::Axis::Y};
  qsim::Topology topology = qsim::Topology::Ring;
  int shots = 0;

  std::vector<nn::Variant> variants{nn::Variant::BaselineMLP};
  std::vector<int> hidden{64, 32};
  int cluster_k = 7;
  nn::ClusterPlacement cluster_placement = nn::ClusterPlacement::Last;

  nn::TrainConfig train;

  int k_min = 2;
  int k_max = 10;
  int cluster_restarts = 10;
  int cluster_max_iter = 100;
  double cluster_tol = 1e-8;
  int sweep_epochs = 30;
};

ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Fully-resolved JSON, parseable by parse_config_json.
std::string dump_config(const ExperimentConfig& cfg);

// FNV-1a of the effective dump; stamped into checkpoints.
std::uint64_t config_hash(const ExperimentConfig& cfg);

// Cross-field checks (qubit budgets, embedding dimensions). Called by
// the parser; public so programmatically-built configs can be checked
// too.
void validate_config(const ExperimentConfig& cfg);

const char* axis_name(qsim::Axis a);
qsim::Axis axis_from_name(const std::string& s);
const char* topology_name(qsim::Topology t);
qsim::Topology topology_from_name(const std::string& s);
const char* term_mode_name(embed::TermMode m);
embed::TermMode term_mode_from_name(const std::string& s);
const char* placement_name(nn::ClusterPlacement p);
nn::ClusterPlacement placement_from_name(const std::string& s);

}  // namespace qfem
