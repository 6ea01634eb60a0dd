#pragma once

#include <optional>
#include <string>

#include "qfem/embed.hpp"
#include "qfem/nn.hpp"
#include "qfem/qsim.hpp"
#include "qfem/standardize.hpp"

namespace qfem::nn {

enum class Variant {
  BaselineMLP,
  QuantumClassical,
  ClassicalQuantum,
  ClusteredMLP,
  PolySPD_Clustered,
  PolySPD_HC_Clustered,
};

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);
const std::vector<Variant>& all_variants();
bool variant_uses_quantum(Variant v);
bool variant_uses_embedding(Variant v);

enum class ClusterPlacement { Last, Penultimate };

// Architecture description; everything needed to rebuild a model shell.
struct VariantSpec {
  Variant variant = Variant::BaselineMLP;
  int sensor_dim = 7;
  int output_dim = 1;
  std::vector<int> hidden{64, 32};
  int cluster_k = 7;  // replaces one hidden width in the clustered variants
  ClusterPlacement cluster_placement = ClusterPlacement::Last;
  embed::PolyConfig poly;  // density-embedding variants only
  double epsilon = 1e-6;
  int qubits = 8;  // ClassicalQuantum angle width; leading-diagonal count
  int layers = 2;
  std::vector<qsim::Axis> axes{qsim::Axis::Y};
  qsim::Topology topology = qsim::Topology::Ring;
};

enum class QuantumInput {
  AngleDirect,      // prepared input is the embedding angle vector
  AngleFromDense,   // angles produced by the front dense stack
  AmplitudeVector,  // prepared input is an amplitude vector
};

struct QuantumBlock {
  qsim::CircuitParams params;
  qsim::ObservableSet obs;
  QuantumInput input = QuantumInput::AngleDirect;
};

struct ParamSegment {
  enum class Kind { Weight, Bias, Angle };
  Kind kind;
  std::size_t offset;
  std::size_t size;
};

// Per-sample forward caches needed by backward_prepared.
struct Workspace {
  std::vector<Vec> pre_in, pre_z;
  Vec q_input;
  qsim::StateVector q_state;
  std::vector<Vec> post_in, post_z;
  Vec output;
};

// One trainable surrogate: optional fixed density-matrix preprocessing,
// optional front dense stack, optional variational circuit, back dense
// stack. Trainable parameters live in one flat vector ordered
// [front W,b]... [circuit angles] [back W,b]...; gradients use the same
// layout.
class HybridModel {
 public:
  VariantSpec spec;
  Standardizer input_std;
  Standardizer target_std;
  std::vector<DenseLayer> pre;
  std::optional<QuantumBlock> quantum;
  std::vector<DenseLayer> post;

  std::size_t param_count() const;
  std::vector<ParamSegment> segments() const;
  Vec get_params() const;
  void set_params(const Vec& flat);

  // Standardizes sensors and runs any fixed embedding; the result is
  // what the trainable pipeline consumes. Deterministic, so callers can
  // precompute it once per sample.
  Vec prepare_input(const Vec& raw_sensors) const;

  Vec forward_prepared(const Vec& prepared, Workspace* ws = nullptr) const;

  Vec predict_standardized(const Vec& raw_sensors) const;
  Vec predict(const Vec& raw_sensors) const;  // raw output units

  // predict() with shot-sampled circuit measurements instead of exact
  // expectation values. Identical to predict() for non-quantum variants.
  Vec predict_sampled(const Vec& raw_sensors, int shots, Rng& rng) const;

  // Accumulates d(loss)/d(params) into grad given d(loss)/d(output).
  // Dense layers backpropagate analytically; circuit angles use the
  // parameter-shift rule.
  void backward_prepared(const Workspace& ws, const Vec& dloss_dpred, Vec& grad) const;

  std::size_t dense_mac_count() const;
};

HybridModel build_variant(const VariantSpec& spec, Rng& rng);

// Qubit count needed to amplitude-encode a length-d*d vectorized
// density matrix: ceil(log2(d^2)).
int qubits_for_embedded_dim(std::size_t state_len);

}  // namespace qfem::nn
