#include "qfem/qsim.hpp"

#include <cmath>
#include <sstream>

#include "doctest.h"

using namespace qfem;
using namespace qfem::qsim;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Unoptimized reference: expectation of Z on `qubit` straight from the
// definition, +1 for basis states with that bit 0, -1 with bit 1.
double brute_z(const StateVector& s, int qubit) {
  double e = 0.0;
  const int shift = s.n_qubits - 1 - qubit;
  for (std::size_t idx = 0; idx < s.dim(); ++idx) {
    const double p = std::norm(s.amplitudes[idx]);
    e += ((idx >> shift) & 1u) ? -p : p;
  }
  return e;
}

double feature_dot(const StateVector& in, const CircuitParams& p, const ObservableSet& obs,
                   const Vec& w) {
  Vec f = measure_features(run_circuit(in, p), obs);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
  return s;
}

}  // namespace

TEST_CASE("init_zero starts in the all-zeros basis state") {
  StateVector s = init_zero(3);
  CHECK(s.dim() == 8);
  CHECK(s.amplitudes[0] == std::complex<double>(1.0, 0.0));
  CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(init_zero(0), ConfigError);
  CHECK_THROWS_AS(init_zero(kMaxQubits + 1), ConfigError);
}

TEST_CASE("Ry rotation matches the closed form") {
  for (double theta : {0.0, 0.1, 0.7, 1.5, kPi / 2, 2.2, kPi}) {
    StateVector s = init_zero(1);
    apply_rotation(s, 0, Axis::Y, theta);
    CHECK(s.amplitudes[0].real() == doctest::Approx(std::cos(theta / 2)).epsilon(1e-15));
    CHECK(s.amplitudes[0].imag() == 0.0);
    CHECK(s.amplitudes[1].real() == doctest::Approx(std::sin(theta / 2)).epsilon(1e-15));
    // <Z> = cos(theta)
    CHECK(brute_z(s, 0) == doctest::Approx(std::cos(theta)).epsilon(1e-14));
  }
  StateVector s = init_zero(1);
  apply_rotation(s, 0, Axis::Y, kPi);
  CHECK(std::abs(s.amplitudes[0]) < 1e-15);  // Ry(pi)|0> = |1>
  CHECK(s.amplitudes[1].real() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Rx and Rz rotations match the closed forms") {
  StateVector s = init_zero(1);
  apply_rotation(s, 0, Axis::X, 0.8);
  CHECK(s.amplitudes[0].real() == doctest::Approx(std::cos(0.4)).epsilon(1e-15));
  CHECK(s.amplitudes[1].imag() == doctest::Approx(-std::sin(0.4)).epsilon(1e-15));
  CHECK(s.amplitudes[1].real() == 0.0);

  StateVector z = init_zero(1);
  apply_rotation(z, 0, Axis::Z, 1.3);
  // pure phase on |0>
  CHECK(std::abs(z.amplitudes[0] - std::polar(1.0, -0.65)) < 1e-15);
  CHECK(brute_z(z, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("rotations act on the addressed qubit only, msb first") {
  StateVector s = init_zero(2);
  apply_rotation(s, 0, Axis::Y, kPi);  // flips qubit 0 -> |10>
  CHECK(std::abs(s.amplitudes[2].real() - 1.0) < 1e-15);

  StateVector t = init_zero(2);
  apply_rotation(t, 1, Axis::Y, kPi);  // flips qubit 1 -> |01>
  CHECK(std::abs(t.amplitudes[1].real() - 1.0) < 1e-15);
}

TEST_CASE("cnot basis table with qubit 0 as control") {
  for (std::size_t basis = 0; basis < 4; ++basis) {
    StateVector s = init_zero(2);
    s.amplitudes[0] = 0.0;
    s.amplitudes[basis] = 1.0;
    apply_cnot(s, 0, 1);
    const std::size_t expect = basis < 2 ? basis : (basis == 2 ? 3 : 2);
    CHECK(std::abs(s.amplitudes[expect] - 1.0) < 1e-15);
  }
  StateVector s = init_zero(2);
  CHECK_THROWS_AS(apply_cnot(s, 1, 1), ConfigError);
}

TEST_CASE("bell state from Ry(pi/2) and cnot") {
  StateVector s = init_zero(2);
  apply_rotation(s, 0, Axis::Y, kPi / 2);
  apply_cnot(s, 0, 1);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(s.amplitudes[0].real() == doctest::Approx(r).epsilon(1e-15));
  CHECK(s.amplitudes[3].real() == doctest::Approx(r).epsilon(1e-15));
  CHECK(std::abs(s.amplitudes[1]) < 1e-15);
  CHECK(brute_z(s, 0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(brute_z(s, 1) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("two-qubit ring circuit traced by hand") {
  // Ry(pi) on q0, Ry(0) on q1, then ring cnots (0,1),(1,0):
  // |00> -> |10> -> |11> -> |01>, so <Z> = [+1, -1]
  CircuitParams p;
  p.n_qubits = 2;
  p.layers = 1;
  p.axes = {Axis::Y};
  p.topology = Topology::Ring;
  p.angles = {kPi, 0.0};
  StateVector out = run_circuit(init_zero(2), p);
  CHECK(std::abs(out.amplitudes[1].real() - 1.0) < 1e-15);
  Vec f = measure_features(out, ObservableSet::all_z(2));
  CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f[1] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("chain topology skips the closing cnot") {
  // same angles; chain applies only (0,1): |00> -> |10> -> |11>
  CircuitParams p;
  p.n_qubits = 2;
  p.layers = 1;
  p.axes = {Axis::Y};
  p.topology = Topology::Chain;
  p.angles = {kPi, 0.0};
  StateVector out = run_circuit(init_zero(2), p);
  CHECK(std::abs(out.amplitudes[3].real() - 1.0) < 1e-15);
}

TEST_CASE("single qubit has no entangler") {
  CircuitParams p;
  p.n_qubits = 1;
  p.layers = 2;
  p.axes = {Axis::Y};
  p.angles = {0.3, 0.4};
  StateVector out = run_circuit(init_zero(1), p);
  // rotations compose: total angle 0.7
  CHECK(out.amplitudes[0].real() == doctest::Approx(std::cos(0.35)).epsilon(1e-14));
}

TEST_CASE("angle_embed rotates each qubit by its own angle") {
  StateVector s = init_zero(3);
  Vec angles{0.2, 1.1, 2.5};
  angle_embed(s, angles);
  Vec f = measure_features(s, ObservableSet::all_z(3));
  for (int q = 0; q < 3; ++q) CHECK(f[q] == doctest::Approx(std::cos(angles[q])).epsilon(1e-14));

  StateVector t = init_zero(2);
  CHECK_THROWS_AS(angle_embed(t, Vec{0.1}), DataError);
}

TEST_CASE("measure_features matches the brute-force definition") {
  Rng rng(5);
  CircuitParams p = random_circuit(4, 3, {Axis::Y, Axis::Z}, Topology::Ring, rng);
  StateVector out = run_circuit(init_zero(4), p);
  Vec f = measure_features(out, ObservableSet::all_z(4));
  for (int q = 0; q < 4; ++q) {
    CHECK(f[q] == doctest::Approx(brute_z(out, q)).epsilon(1e-13));
    CHECK(f[q] >= -1.0 - 1e-12);
    CHECK(f[q] <= 1.0 + 1e-12);
  }
}

TEST_CASE("amplitude_init normalizes, pads and validates") {
  Vec v{3.0, 4.0};
  StateVector s = amplitude_init(v, 1);
  CHECK(s.amplitudes[0].real() == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(s.amplitudes[1].real() == doctest::Approx(0.8).epsilon(1e-15));

  // shorter vectors are zero-padded
  StateVector padded = amplitude_init(Vec{1.0, 1.0, 1.0}, 2);
  CHECK(padded.dim() == 4);
  CHECK(std::abs(padded.amplitudes[3]) == 0.0);
  CHECK(padded.norm() == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(amplitude_init(Vec(5, 1.0), 2), DataError);   // too long
  CHECK_THROWS_AS(amplitude_init(Vec{0.0, 0.0}, 1), DataError);  // zero norm
  CHECK_THROWS_AS(amplitude_init(Vec{std::nan("")}, 1), DataError);
}

TEST_CASE("amplitude_init of a normalized vector is bit-stable") {
  Rng rng(21);
  Vec v(8);
  for (double& x : v) x = rng.normal();
  StateVector first = amplitude_init(v, 3);
  Vec real_amps(first.dim());
  for (std::size_t i = 0; i < first.dim(); ++i) real_amps[i] = first.amplitudes[i].real();
  StateVector second = amplitude_init(real_amps, 3);
  for (std::size_t i = 0; i < first.dim(); ++i)
    CHECK(second.amplitudes[i] == first.amplitudes[i]);
}

TEST_CASE("sampled measurement converges and is reproducible") {
  StateVector s = init_zero(2);
  apply_rotation(s, 0, Axis::Y, 1.1);
  apply_rotation(s, 1, Axis::Y, 2.3);
  ObservableSet obs = ObservableSet::all_z(2);
  Vec exact = measure_features(s, obs);

  const int shots = 40000;
  Rng rng(7);
  Vec est = measure_features_sampled(s, obs, shots, rng);
  for (int q = 0; q < 2; ++q) {
    const double sigma = std::sqrt((1.0 - exact[q] * exact[q]) / shots);
    CHECK(std::abs(est[q] - exact[q]) < 5.0 * sigma + 1e-12);
  }

  Rng rng2(7);
  Vec est2 = measure_features_sampled(s, obs, shots, rng2);
  CHECK(est == est2);

  Rng rng3(8);
  CHECK_THROWS_AS(measure_features_sampled(s, obs, 0, rng3), ConfigError);
}

TEST_CASE("parameter shift reproduces -sin(theta) exactly") {
  CircuitParams p;
  p.n_qubits = 1;
  p.layers = 1;
  p.axes = {Axis::Y};
  ObservableSet obs = ObservableSet::all_z(1);
  for (int i = 0; i < 64; ++i) {
    const double theta = -kPi + 2.0 * kPi * (i + 0.5) / 64.0;
    p.angles = {theta};
    Vec g = param_shift_grad(init_zero(1), p, obs, Vec{1.0});
    CHECK(std::abs(g[0] - (-std::sin(theta))) < 1e-12);
  }
}

TEST_CASE("parameter shift agrees with finite differences on random circuits") {
  Rng rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + static_cast<int>(rng.index(3));  // 2..4
    const int layers = 1 + static_cast<int>(rng.index(2));
    std::vector<Axis> axes = (trial % 2) ? std::vector<Axis>{Axis::Y}
                                         : std::vector<Axis>{Axis::Y, Axis::Z};
    Topology topo = (trial % 3) ? Topology::Ring : Topology::Chain;
    CircuitParams p = random_circuit(n, layers, axes, topo, rng);
    ObservableSet obs = ObservableSet::all_z(n);
    Vec w(static_cast<std::size_t>(n));
    for (double& x : w) x = rng.uniform(-1.0, 1.0);
    StateVector in = init_zero(n);

    Vec g = param_shift_grad(in, p, obs, w);
    REQUIRE(g.size() == p.angle_count());
    const double h = 1e-6;
    for (std::size_t k = 0; k < g.size(); ++k) {
      CircuitParams pp = p, pm = p;
      pp.angles[k] += h;
      pm.angles[k] -= h;
      const double fd = (feature_dot(in, pp, obs, w) - feature_dot(in, pm, obs, w)) / (2 * h);
      CHECK(std::abs(g[k] - fd) < 1e-6);
    }
  }
}

TEST_CASE("input-angle gradients agree with finite differences") {
  Rng rng(77);
  const int n = 3;
  CircuitParams p = random_circuit(n, 2, {Axis::Y}, Topology::Ring, rng);
  ObservableSet obs = ObservableSet::all_z(n);
  Vec w{0.3, -0.8, 0.5};
  Vec embed_angles{0.4, 1.9, -1.2};

  Vec g = param_shift_input_grad(embed_angles, p, obs, w);
  REQUIRE(g.size() == embed_angles.size());
  const double h = 1e-6;
  for (std::size_t k = 0; k < g.size(); ++k) {
    auto eval = [&](double delta) {
      Vec a = embed_angles;
      a[k] += delta;
      StateVector s = init_zero(n);
      angle_embed(s, a);
      return feature_dot(s, p, obs, w);
    };
    const double fd = (eval(h) - eval(-h)) / (2 * h);
    CHECK(std::abs(g[k] - fd) < 1e-6);
  }
}

TEST_CASE("run_circuit validates angle count and qubit budget") {
  CircuitParams p;
  p.n_qubits = 2;
  p.layers = 1;
  p.axes = {Axis::Y};
  p.angles = {0.1};  // needs 2
  CHECK_THROWS_AS(run_circuit(init_zero(2), p), ConfigError);

  CircuitParams big;
  big.n_qubits = kMaxQubits + 1;
  big.layers = 1;
  big.angles.assign(static_cast<std::size_t>(kMaxQubits + 1), 0.0);
  CHECK_THROWS_AS(big.validate(), ConfigError);
}

TEST_CASE("dump_state emits one line per amplitude") {
  StateVector s = init_zero(2);
  std::ostringstream os;
  dump_state(s, os);
  std::string text = os.str();
  int lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == 4);
}
