#include "qfem/qsim.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "qfem/numeric_io.hpp"

namespace qfem::qsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_qubit_count(int n) {
  if (n < 1) throw ConfigError("qubit count must be at least 1");
  if (n > kMaxQubits) {
    std::ostringstream msg;
    msg << "qubit count " << n << " exceeds simulator cap of " << kMaxQubits;
    throw ConfigError(msg.str());
  }
}

void check_qubit_index(const StateVector& state, int q, const char* what) {
  if (q < 0 || q >= state.n_qubits) {
    std::ostringstream msg;
    msg << what << ": qubit " << q << " out of range for " << state.n_qubits << "-qubit state";
    throw ConfigError(msg.str());
  }
}

// General single-qubit unitary [[u00, u01], [u10, u11]] on `qubit`.
void apply_1q(StateVector& state, int qubit, std::complex<double> u00, std::complex<double> u01,
              std::complex<double> u10, std::complex<double> u11) {
  std::size_t stride = std::size_t{1} << (state.n_qubits - 1 - qubit);
  std::size_t dim = state.dim();
  auto& amp = state.amplitudes;
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t k = 0; k < stride; ++k) {
      std::size_t i0 = base + k;
      std::size_t i1 = i0 + stride;
      std::complex<double> a0 = amp[i0];
      std::complex<double> a1 = amp[i1];
      amp[i0] = u00 * a0 + u01 * a1;
      amp[i1] = u10 * a0 + u11 * a1;
    }
  }
}

}  // namespace

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return std::sqrt(s);
}

void CircuitParams::validate() const {
  check_qubit_count(n_qubits);
  if (layers < 1) throw ConfigError("circuit must have at least 1 layer");
  if (axes.empty()) throw ConfigError("circuit needs at least one rotation axis per layer");
  if (angles.size() != angle_count()) {
    std::ostringstream msg;
    msg << "angle tensor has " << angles.size() << " entries, expected " << angle_count();
    throw ConfigError(msg.str());
  }
  if (!all_finite(angles)) throw NumericalError("circuit angles contain non-finite values");
}

CircuitParams random_circuit(int n_qubits, int layers, const std::vector<Axis>& axes,
                             Topology topology, Rng& rng) {
  CircuitParams p;
  p.n_qubits = n_qubits;
  p.layers = layers;
  p.axes = axes;
  p.topology = topology;
  p.angles.resize(p.angle_count());
  for (double& a : p.angles) a = rng.uniform(-kPi, kPi);
  p.validate();
  return p;
}

ObservableSet ObservableSet::all_z(int n_qubits) {
  ObservableSet obs;
  obs.z_qubits.resize(static_cast<std::size_t>(n_qubits));
  for (int q = 0; q < n_qubits; ++q) obs.z_qubits[static_cast<std::size_t>(q)] = q;
  return obs;
}

StateVector init_zero(int n_qubits) {
  check_qubit_count(n_qubits);
  StateVector state;
  state.n_qubits = n_qubits;
  state.amplitudes.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
  state.amplitudes[0] = {1.0, 0.0};
  return state;
}

StateVector amplitude_init(const Vec& v, int n_qubits) {
  check_qubit_count(n_qubits);
  std::size_t dim = std::size_t{1} << n_qubits;
  if (v.size() > dim) {
    std::ostringstream msg;
    msg << "amplitude vector of length " << v.size() << " does not fit in " << n_qubits
        << " qubits (" << dim << " amplitudes)";
    throw DataError(msg.str());
  }
  if (!all_finite(v)) throw DataError("amplitude_init: non-finite input");
  double n2 = dot(v, v);
  if (!(n2 > 0.0)) throw DataError("amplitude_init: zero vector cannot be normalized");
  double nrm = std::sqrt(n2);

  StateVector state;
  state.n_qubits = n_qubits;
  state.amplitudes.assign(dim, {0.0, 0.0});
  // Skip the division when the input is already normalized so repeated
  // initialization is bit-stable.
  if (std::abs(nrm - 1.0) <= 4e-16) {
    for (std::size_t i = 0; i < v.size(); ++i) state.amplitudes[i] = {v[i], 0.0};
  } else {
    for (std::size_t i = 0; i < v.size(); ++i) state.amplitudes[i] = {v[i] / nrm, 0.0};
  }
  return state;
}

void apply_rotation(StateVector& state, int qubit, Axis axis, double theta) {
  check_qubit_index(state, qubit, "apply_rotation");
  double c = std::cos(theta / 2.0);
  double s = std::sin(theta / 2.0);
  switch (axis) {
    case Axis::X:
      apply_1q(state, qubit, {c, 0.0}, {0.0, -s}, {0.0, -s}, {c, 0.0});
      break;
    case Axis::Y:
      apply_1q(state, qubit, {c, 0.0}, {-s, 0.0}, {s, 0.0}, {c, 0.0});
      break;
    case Axis::Z:
      apply_1q(state, qubit, {c, -s}, {0.0, 0.0}, {0.0, 0.0}, {c, s});
      break;
  }
}

void apply_cnot(StateVector& state, int control, int target) {
  check_qubit_index(state, control, "apply_cnot");
  check_qubit_index(state, target, "apply_cnot");
  if (control == target) throw ConfigError("apply_cnot: control equals target");
  std::size_t cmask = std::size_t{1} << (state.n_qubits - 1 - control);
  std::size_t tmask = std::size_t{1} << (state.n_qubits - 1 - target);
  auto& amp = state.amplitudes;
  std::size_t dim = state.dim();
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & cmask) != 0 && (i & tmask) == 0) std::swap(amp[i], amp[i | tmask]);
  }
}

void angle_embed(StateVector& state, const Vec& angles) {
  if (angles.size() != static_cast<std::size_t>(state.n_qubits))
    throw DataError("angle_embed: one angle per qubit required");
  if (!all_finite(angles)) throw DataError("angle_embed: non-finite angles");
  for (int q = 0; q < state.n_qubits; ++q)
    apply_rotation(state, q, Axis::Y, angles[static_cast<std::size_t>(q)]);
}

void entangling_layer(StateVector& state, const CircuitParams& params, int layer) {
  if (layer < 0 || layer >= params.layers) throw ConfigError("entangling_layer: layer out of range");
  int n = params.n_qubits;
  for (int q = 0; q < n; ++q)
    for (std::size_t r = 0; r < params.axes.size(); ++r)
      apply_rotation(state, q, params.axes[r], params.angles[params.angle_index(layer, q, r)]);
  if (n < 2) return;
  int last = params.topology == Topology::Ring ? n : n - 1;
  for (int q = 0; q < last; ++q) apply_cnot(state, q, (q + 1) % n);
}

StateVector run_circuit(StateVector input, const CircuitParams& params) {
  params.validate();
  if (input.n_qubits != params.n_qubits)
    throw ConfigError("run_circuit: state and circuit qubit counts differ");
  for (int l = 0; l < params.layers; ++l) entangling_layer(input, params, l);
  return input;
}

Vec measure_features(const StateVector& state, const ObservableSet& obs) {
  Vec out;
  out.reserve(obs.z_qubits.size());
  for (int q : obs.z_qubits) {
    check_qubit_index(state, q, "measure_features");
    std::size_t mask = std::size_t{1} << (state.n_qubits - 1 - q);
    double z = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
      double p = std::norm(state.amplitudes[i]);
      z += (i & mask) == 0 ? p : -p;
    }
    out.push_back(z);
  }
  return out;
}

Vec measure_features_sampled(const StateVector& state, const ObservableSet& obs, int shots,
                             Rng& rng) {
  if (shots < 1) throw ConfigError("measure_features_sampled: shots must be positive");
  std::size_t dim = state.dim();
  Vec cdf(dim);
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    acc += std::norm(state.amplitudes[i]);
    cdf[i] = acc;
  }
  Vec sums(obs.z_qubits.size(), 0.0);
  for (int q : obs.z_qubits) check_qubit_index(state, q, "measure_features_sampled");
  for (int s = 0; s < shots; ++s) {
    double u = rng.uniform() * acc;
    std::size_t lo = 0, hi = dim - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (cdf[mid] > u)
        hi = mid;
      else
        lo = mid + 1;
    }
    for (std::size_t j = 0; j < obs.z_qubits.size(); ++j) {
      std::size_t mask = std::size_t{1} << (state.n_qubits - 1 - obs.z_qubits[j]);
      sums[j] += (lo & mask) == 0 ? 1.0 : -1.0;
    }
  }
  for (double& v : sums) v /= static_cast<double>(shots);
  return sums;
}

namespace {

double contracted_features(const StateVector& input, const CircuitParams& params,
                           const ObservableSet& obs, const Vec& downstream) {
  Vec f = measure_features(run_circuit(input, params), obs);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += downstream[i] * f[i];
  return s;
}

}  // namespace

Vec param_shift_grad(const StateVector& input, const CircuitParams& params,
                     const ObservableSet& obs, const Vec& downstream) {
  params.validate();
  if (downstream.size() != obs.z_qubits.size())
    throw DataError("param_shift_grad: downstream size must match observable count");
  CircuitParams shifted = params;
  Vec grad(params.angles.size());
  for (std::size_t a = 0; a < params.angles.size(); ++a) {
    double theta = params.angles[a];
    shifted.angles[a] = theta + kPi / 2.0;
    double plus = contracted_features(input, shifted, obs, downstream);
    shifted.angles[a] = theta - kPi / 2.0;
    double minus = contracted_features(input, shifted, obs, downstream);
    shifted.angles[a] = theta;
    grad[a] = (plus - minus) / 2.0;
  }
  return grad;
}

Vec param_shift_input_grad(const Vec& embed_angles, const CircuitParams& params,
                           const ObservableSet& obs, const Vec& downstream) {
  params.validate();
  if (downstream.size() != obs.z_qubits.size())
    throw DataError("param_shift_input_grad: downstream size must match observable count");
  if (embed_angles.size() != static_cast<std::size_t>(params.n_qubits))
    throw DataError("param_shift_input_grad: one embedding angle per qubit required");
  Vec shifted = embed_angles;
  Vec grad(embed_angles.size());
  for (std::size_t a = 0; a < embed_angles.size(); ++a) {
    double theta = embed_angles[a];
    shifted[a] = theta + kPi / 2.0;
    StateVector sp = init_zero(params.n_qubits);
    angle_embed(sp, shifted);
    double plus = contracted_features(sp, params, obs, downstream);
    shifted[a] = theta - kPi / 2.0;
    StateVector sm = init_zero(params.n_qubits);
    angle_embed(sm, shifted);
    double minus = contracted_features(sm, params, obs, downstream);
    shifted[a] = theta;
    grad[a] = (plus - minus) / 2.0;
  }
  return grad;
}

void dump_state(const StateVector& state, std::ostream& os) {
  for (std::size_t i = 0; i < state.dim(); ++i) {
    os << i << ' ' << format_double(state.amplitudes[i].real()) << ' '
       << format_double(state.amplitudes[i].imag()) << '\n';
  }
}

}  // namespace qfem::qsim
