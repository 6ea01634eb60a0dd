#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "qfem/linalg.hpp"
#include "qfem/rng.hpp"

namespace qfem::qsim {

// Hard cap: 2^14 amplitudes is the largest state we simulate.
inline constexpr int kMaxQubits = 14;

// Basis-state index convention: qubit 0 is the most significant bit, so
// |q0 q1 ... q(n-1)> lives at index q0*2^(n-1) + ... + q(n-1).
struct StateVector {
  int n_qubits = 0;
  std::vector<std::complex<double>> amplitudes;

  std::size_t dim() const { return amplitudes.size(); }
  double norm() const;
};

enum class Axis { X, Y, Z };
enum class Topology { Ring, Chain };

// Variational circuit: `layers` blocks, each applying one rotation per
// axis per qubit (axes in order, per qubit) followed by a CNOT
// entangler over the chosen topology. Ring on n=1 has no entangler.
struct CircuitParams {
  int n_qubits = 0;
  int layers = 1;
  std::vector<Axis> axes{Axis::Y};
  Topology topology = Topology::Ring;
  Vec angles;  // flat [layer][qubit][axis], radians

  std::size_t rotations_per_qubit() const { return axes.size(); }
  std::size_t angle_count() const {
    return static_cast<std::size_t>(layers) * static_cast<std::size_t>(n_qubits) * axes.size();
  }
  std::size_t angle_index(int layer, int qubit, std::size_t axis) const {
    return (static_cast<std::size_t>(layer) * static_cast<std::size_t>(n_qubits) +
            static_cast<std::size_t>(qubit)) *
               axes.size() +
           axis;
  }
  void validate() const;
};

// Angles drawn uniform in [-pi, pi].
CircuitParams random_circuit(int n_qubits, int layers, const std::vector<Axis>& axes,
                             Topology topology, Rng& rng);

struct ObservableSet {
  std::vector<int> z_qubits;  // single-qubit Pauli-Z targets
  static ObservableSet all_z(int n_qubits);
};

StateVector init_zero(int n_qubits);

// Normalizes v, zero-pads to 2^n_qubits. Re-initializing with an
// already-normalized vector returns it bit-identically (the division is
// skipped when the norm is 1 within a few ulps).
StateVector amplitude_init(const Vec& v, int n_qubits);

// exp(-i theta sigma/2) rotations; Ry(pi)|0> = |1>.
void apply_rotation(StateVector& state, int qubit, Axis axis, double theta);
void apply_cnot(StateVector& state, int control, int target);

// Ry(theta_i) on each qubit of |0...0>; angles.size() must equal n.
void angle_embed(StateVector& state, const Vec& angles);

// One variational block of `params` at the given layer.
void entangling_layer(StateVector& state, const CircuitParams& params, int layer);

StateVector run_circuit(StateVector input, const CircuitParams& params);

// Exact expectation values <Z_q>, each in [-1, 1].
Vec measure_features(const StateVector& state, const ObservableSet& obs);

// Finite-shot estimate: samples basis states from |amp|^2.
Vec measure_features_sampled(const StateVector& state, const ObservableSet& obs, int shots,
                             Rng& rng);

// Parameter-shift gradients d<loss>/d(angle): evaluates each feature at
// theta +/- pi/2 and contracts (f+ - f-)/2 with downstream = dL/dfeature.
// Exact for Pauli rotations. Returns a flat vector aligned with
// params.angles.
Vec param_shift_grad(const StateVector& input, const CircuitParams& params,
                     const ObservableSet& obs, const Vec& downstream);

// Same rule applied to the data-embedding angles of an angle-encoded
// input (the circuit parameters stay fixed).
Vec param_shift_input_grad(const Vec& embed_angles, const CircuitParams& params,
                           const ObservableSet& obs, const Vec& downstream);

// Debug dump: one "index real imag" line per amplitude.
void dump_state(const StateVector& state, std::ostream& os);

}  // namespace qfem::qsim
