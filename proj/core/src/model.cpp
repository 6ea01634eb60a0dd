#include "qfem/model.hpp"

#include <cmath>
#include <sstream>

namespace qfem::nn {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::BaselineMLP:
      return "BaselineMLP";
    case Variant::QuantumClassical:
      return "QuantumClassical";
    case Variant::ClassicalQuantum:
      return "ClassicalQuantum";
    case Variant::ClusteredMLP:
      return "ClusteredMLP";
    case Variant::PolySPD_Clustered:
      return "PolySPD_Clustered";
    case Variant::PolySPD_HC_Clustered:
      return "PolySPD_HC_Clustered";
  }
  return "unknown";
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v{
      Variant::BaselineMLP,       Variant::QuantumClassical,  Variant::ClassicalQuantum,
      Variant::ClusteredMLP,      Variant::PolySPD_Clustered, Variant::PolySPD_HC_Clustered,
  };
  return v;
}

Variant variant_from_name(const std::string& name) {
  for (Variant v : all_variants())
    if (name == variant_name(v)) return v;
  throw ConfigError("unknown model variant '" + name + "'");
}

bool variant_uses_quantum(Variant v) {
  return v != Variant::BaselineMLP && v != Variant::ClusteredMLP;
}

bool variant_uses_embedding(Variant v) {
  return v == Variant::PolySPD_Clustered || v == Variant::PolySPD_HC_Clustered;
}

int qubits_for_embedded_dim(std::size_t state_len) {
  if (state_len == 0) throw DataError("qubits_for_embedded_dim: empty state");
  int n = 0;
  std::size_t d = 1;
  while (d < state_len) {
    d <<= 1;
    ++n;
  }
  return n < 1 ? 1 : n;
}

std::size_t HybridModel::param_count() const {
  std::size_t total = 0;
  for (const DenseLayer& l : pre) total += l.out_dim() * l.in_dim() + l.out_dim();
  if (quantum) total += quantum->params.angles.size();
  for (const DenseLayer& l : post) total += l.out_dim() * l.in_dim() + l.out_dim();
  return total;
}

std::vector<ParamSegment> HybridModel::segments() const {
  std::vector<ParamSegment> segs;
  std::size_t off = 0;
  auto add_dense = [&](const DenseLayer& l) {
    std::size_t nw = l.out_dim() * l.in_dim();
    segs.push_back({ParamSegment::Kind::Weight, off, nw});
    off += nw;
    segs.push_back({ParamSegment::Kind::Bias, off, l.bias.size()});
    off += l.bias.size();
  };
  for (const DenseLayer& l : pre) add_dense(l);
  if (quantum) {
    segs.push_back({ParamSegment::Kind::Angle, off, quantum->params.angles.size()});
    off += quantum->params.angles.size();
  }
  for (const DenseLayer& l : post) add_dense(l);
  return segs;
}

Vec HybridModel::get_params() const {
  Vec flat;
  flat.reserve(param_count());
  auto pull_dense = [&](const DenseLayer& l) {
    const double* w = l.weights.data();
    flat.insert(flat.end(), w, w + l.out_dim() * l.in_dim());
    flat.insert(flat.end(), l.bias.begin(), l.bias.end());
  };
  for (const DenseLayer& l : pre) pull_dense(l);
  if (quantum) flat.insert(flat.end(), quantum->params.angles.begin(), quantum->params.angles.end());
  for (const DenseLayer& l : post) pull_dense(l);
  return flat;
}

void HybridModel::set_params(const Vec& flat) {
  if (flat.size() != param_count())
    throw NumericalError("set_params: flat vector size does not match model");
  std::size_t off = 0;
  auto push_dense = [&](DenseLayer& l) {
    std::size_t nw = l.out_dim() * l.in_dim();
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
              flat.begin() + static_cast<std::ptrdiff_t>(off + nw), l.weights.data());
    off += nw;
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
              flat.begin() + static_cast<std::ptrdiff_t>(off + l.bias.size()), l.bias.begin());
    off += l.bias.size();
  };
  for (DenseLayer& l : pre) push_dense(l);
  if (quantum) {
    std::size_t na = quantum->params.angles.size();
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
              flat.begin() + static_cast<std::ptrdiff_t>(off + na),
              quantum->params.angles.begin());
    off += na;
  }
  for (DenseLayer& l : post) push_dense(l);
}

Vec HybridModel::prepare_input(const Vec& raw_sensors) const {
  Vec s = input_std.transform(raw_sensors);
  switch (spec.variant) {
    case Variant::PolySPD_Clustered: {
      Matrix rho = embed::embed_density(s, spec.poly, spec.epsilon);
      std::size_t n = static_cast<std::size_t>(quantum->params.n_qubits);
      Vec angles(n);
      // leading diagonal of the density matrix, scaled into [0, pi]
      for (std::size_t i = 0; i < n; ++i) angles[i] = kPi * rho(i, i);
      return angles;
    }
    case Variant::PolySPD_HC_Clustered:
      return embed::embed(s, spec.poly, spec.epsilon).amplitudes;
    default:
      return s;
  }
}

Vec HybridModel::forward_prepared(const Vec& prepared, Workspace* ws) const {
  Workspace local;
  Workspace& w = ws ? *ws : local;
  w.pre_in.resize(pre.size());
  w.pre_z.resize(pre.size());
  w.post_in.resize(post.size());
  w.post_z.resize(post.size());

  Vec cur = prepared;
  for (std::size_t k = 0; k < pre.size(); ++k) {
    w.pre_in[k] = cur;
    cur = dense_forward(pre[k], cur, &w.pre_z[k]);
  }
  if (quantum) {
    w.q_input = cur;
    qsim::StateVector state;
    if (quantum->input == QuantumInput::AmplitudeVector) {
      state = qsim::amplitude_init(cur, quantum->params.n_qubits);
    } else {
      state = qsim::init_zero(quantum->params.n_qubits);
      qsim::angle_embed(state, cur);
    }
    w.q_state = state;
    cur = qsim::measure_features(qsim::run_circuit(std::move(state), quantum->params),
                                 quantum->obs);
  }
  for (std::size_t k = 0; k < post.size(); ++k) {
    w.post_in[k] = cur;
    cur = dense_forward(post[k], cur, &w.post_z[k]);
  }
  w.output = cur;
  return cur;
}

Vec HybridModel::predict_standardized(const Vec& raw_sensors) const {
  return forward_prepared(prepare_input(raw_sensors));
}

Vec HybridModel::predict(const Vec& raw_sensors) const {
  return target_std.inverse(predict_standardized(raw_sensors));
}

Vec HybridModel::predict_sampled(const Vec& raw_sensors, int shots, Rng& rng) const {
  Vec cur = prepare_input(raw_sensors);
  for (const DenseLayer& layer : pre) cur = dense_forward(layer, cur, nullptr);
  if (quantum) {
    qsim::StateVector state;
    if (quantum->input == QuantumInput::AmplitudeVector) {
      state = qsim::amplitude_init(cur, quantum->params.n_qubits);
    } else {
      state = qsim::init_zero(quantum->params.n_qubits);
      qsim::angle_embed(state, cur);
    }
    cur = qsim::measure_features_sampled(qsim::run_circuit(std::move(state), quantum->params),
                                         quantum->obs, shots, rng);
  }
  for (const DenseLayer& layer : post) cur = dense_forward(layer, cur, nullptr);
  return target_std.inverse(cur);
}

namespace {

// Backprop through one dense stack, accumulating into grad at the given
// per-layer weight/bias offsets. Returns d(loss)/d(stack input).
Vec backprop_stack(const std::vector<DenseLayer>& stack, const std::vector<Vec>& inputs,
                   const std::vector<Vec>& pre_acts, Vec delta,
                   const std::vector<std::size_t>& w_off, const std::vector<std::size_t>& b_off,
                   Vec& grad) {
  for (std::size_t ri = stack.size(); ri-- > 0;) {
    const DenseLayer& layer = stack[ri];
    const Vec& z = pre_acts[ri];
    const Vec& in = inputs[ri];
    Vec dz = std::move(delta);
    if (layer.act == Activation::ReLU)
      for (std::size_t i = 0; i < dz.size(); ++i)
        if (z[i] <= 0.0) dz[i] = 0.0;
    double* gw = grad.data() + w_off[ri];
    double* gb = grad.data() + b_off[ri];
    std::size_t in_dim = layer.in_dim();
    for (std::size_t i = 0; i < layer.out_dim(); ++i) {
      double d = dz[i];
      gb[i] += d;
      if (d == 0.0) continue;
      double* gwrow = gw + i * in_dim;
      for (std::size_t j = 0; j < in_dim; ++j) gwrow[j] += d * in[j];
    }
    Vec next(in_dim, 0.0);
    for (std::size_t i = 0; i < layer.out_dim(); ++i) {
      double d = dz[i];
      if (d == 0.0) continue;
      const double* wrow = layer.weights.data() + i * in_dim;
      for (std::size_t j = 0; j < in_dim; ++j) next[j] += wrow[j] * d;
    }
    delta = std::move(next);
  }
  return delta;
}

}  // namespace

void HybridModel::backward_prepared(const Workspace& ws, const Vec& dloss_dpred,
                                    Vec& grad) const {
  if (grad.size() != param_count())
    throw NumericalError("backward_prepared: gradient buffer size mismatch");

  // Offsets in the flat layout: pre stack, angles, post stack.
  std::vector<std::size_t> pre_w(pre.size()), pre_b(pre.size());
  std::vector<std::size_t> post_w(post.size()), post_b(post.size());
  std::size_t off = 0;
  for (std::size_t k = 0; k < pre.size(); ++k) {
    pre_w[k] = off;
    off += pre[k].out_dim() * pre[k].in_dim();
    pre_b[k] = off;
    off += pre[k].out_dim();
  }
  std::size_t angle_off = off;
  if (quantum) off += quantum->params.angles.size();
  for (std::size_t k = 0; k < post.size(); ++k) {
    post_w[k] = off;
    off += post[k].out_dim() * post[k].in_dim();
    post_b[k] = off;
    off += post[k].out_dim();
  }

  Vec delta = backprop_stack(post, ws.post_in, ws.post_z, dloss_dpred, post_w, post_b, grad);

  if (quantum) {
    Vec agrad = qsim::param_shift_grad(ws.q_state, quantum->params, quantum->obs, delta);
    for (std::size_t a = 0; a < agrad.size(); ++a) grad[angle_off + a] += agrad[a];
    if (quantum->input != QuantumInput::AngleFromDense) return;
    delta = qsim::param_shift_input_grad(ws.q_input, quantum->params, quantum->obs, delta);
  }
  backprop_stack(pre, ws.pre_in, ws.pre_z, std::move(delta), pre_w, pre_b, grad);
}

std::size_t HybridModel::dense_mac_count() const {
  std::size_t total = 0;
  for (const DenseLayer& l : pre) total += l.out_dim() * l.in_dim();
  for (const DenseLayer& l : post) total += l.out_dim() * l.in_dim();
  return total;
}

HybridModel build_variant(const VariantSpec& spec, Rng& rng) {
  if (spec.sensor_dim < 1) throw ConfigError("build_variant: sensor_dim must be positive");
  if (spec.output_dim < 1) throw ConfigError("build_variant: output_dim must be positive");
  if (spec.hidden.size() != 2 || spec.hidden[0] < 1 || spec.hidden[1] < 1)
    throw ConfigError("build_variant: expected two positive hidden widths");
  if (spec.cluster_k < 1) throw ConfigError("build_variant: cluster_k must be positive");
  if (spec.layers < 1) throw ConfigError("build_variant: circuit needs at least one layer");

  HybridModel m;
  m.spec = spec;
  m.input_std = Standardizer::identity(static_cast<std::size_t>(spec.sensor_dim));
  m.target_std = Standardizer::identity(static_cast<std::size_t>(spec.output_dim));

  int in = spec.sensor_dim;
  int out = spec.output_dim;
  int h1 = spec.hidden[0];
  int h2 = spec.hidden[1];
  int k = spec.cluster_k;

  auto dense = [&rng](int i, int o, Activation a) {
    return make_dense(static_cast<std::size_t>(i), static_cast<std::size_t>(o), a, rng);
  };
  auto make_quantum = [&](int n, QuantumInput input) {
    QuantumBlock block;
    block.params = qsim::random_circuit(n, spec.layers, spec.axes, spec.topology, rng);
    block.obs = qsim::ObservableSet::all_z(n);
    block.input = input;
    return block;
  };
  // One hidden width is tied to the cluster count in the clustered
  // variants; placement picks which.
  auto clustered_tail = [&](int front) {
    if (spec.cluster_placement == ClusterPlacement::Last) {
      m.post.push_back(dense(front, h1, Activation::ReLU));
      m.post.push_back(dense(h1, k, Activation::ReLU));
      m.post.push_back(dense(k, out, Activation::Identity));
    } else {
      m.post.push_back(dense(front, k, Activation::ReLU));
      m.post.push_back(dense(k, h2, Activation::ReLU));
      m.post.push_back(dense(h2, out, Activation::Identity));
    }
  };

  switch (spec.variant) {
    case Variant::BaselineMLP:
      m.post.push_back(dense(in, h1, Activation::ReLU));
      m.post.push_back(dense(h1, h2, Activation::ReLU));
      m.post.push_back(dense(h2, out, Activation::Identity));
      break;
    case Variant::ClusteredMLP:
      clustered_tail(in);
      break;
    case Variant::QuantumClassical:
      // sensors become rotation angles, one qubit per sensor
      m.quantum = make_quantum(in, QuantumInput::AngleDirect);
      m.post.push_back(dense(in, h1, Activation::ReLU));
      m.post.push_back(dense(h1, h2, Activation::ReLU));
      m.post.push_back(dense(h2, out, Activation::Identity));
      break;
    case Variant::ClassicalQuantum: {
      int n = spec.qubits;
      m.pre.push_back(dense(in, h1, Activation::ReLU));
      m.pre.push_back(dense(h1, h2, Activation::ReLU));
      m.pre.push_back(dense(h2, n, Activation::Identity));
      m.quantum = make_quantum(n, QuantumInput::AngleFromDense);
      m.post.push_back(dense(n, out, Activation::Identity));
      break;
    }
    case Variant::PolySPD_Clustered: {
      std::size_t d = embed::expanded_dim(static_cast<std::size_t>(in), spec.poly);
      int n = spec.qubits;
      if (static_cast<std::size_t>(n) > d) {
        std::ostringstream msg;
        msg << "PolySPD_Clustered: " << n << " qubits but the density matrix is only " << d
            << "x" << d;
        throw ConfigError(msg.str());
      }
      m.quantum = make_quantum(n, QuantumInput::AngleDirect);
      clustered_tail(n);
      break;
    }
    case Variant::PolySPD_HC_Clustered: {
      std::size_t d = embed::expanded_dim(static_cast<std::size_t>(in), spec.poly);
      int n = qubits_for_embedded_dim(d * d);
      m.quantum = make_quantum(n, QuantumInput::AmplitudeVector);
      clustered_tail(n);
      break;
    }
  }
  return m;
}

}  // namespace qfem::nn
