#pragma once

#include <cstdint>
#include <string>

#include "qfem/linalg.hpp"
#include "qfem/rng.hpp"

namespace qfem::fem {

// 6 DOFs per node: ux, uy, uz, rx, ry, rz (global frame, x along the
// span, z up).
inline constexpr int kDofPerNode = 6;

struct Node {
  double x, y, z;
};

struct SectionProperties {
  double elastic_modulus = 2.0e11;  // Pa, structural steel
  double shear_modulus = 7.7e10;
  double area = 4.544e-3;             // m^2, 150x150x8 hollow square
  double inertia_y = 1.4865e-5;       // m^4
  double inertia_z = 1.4865e-5;       // m^4
  double torsion_constant = 2.29e-5;  // m^4
};

struct Element {
  int node_i, node_j;
};

// One lateral face of the frame envelope for wind loading: outward
// normal in the ground plane plus per-node tributary areas.
struct Face {
  double nx, ny;
  std::vector<int> nodes;
  Vec areas;  // m^2 per node
};

struct FrameModel {
  std::vector<Node> nodes;
  std::vector<Element> elements;
  SectionProperties section;
  std::vector<int> fixed_dofs;           // sorted global DOF indices
  std::vector<int> top_chord_elements;   // carry the distributed material load
  std::vector<Face> faces;

  int dof_count() const { return kDofPerNode * static_cast<int>(nodes.size()); }
  std::uint64_t geometry_hash() const;
};

struct FrameConfig {
  int bays = 10;
  double span = 23.65;  // m
  double width = 3.6;
  double height = 2.6;
  SectionProperties section;
};

// Box truss frame: `bays`+1 rectangular cross frames joined by four
// longitudinal chords, with alternating side and plan diagonals. The
// four base corner nodes are fully fixed.
FrameModel build_frame(const FrameConfig& cfg);

// 12x12 Euler-Bernoulli space-beam stiffness in local coordinates
// (local x along the member).
Matrix element_stiffness_local(const SectionProperties& s, double length);

// 3x3 direction cosine matrix, rows = local axes in global components.
Matrix element_rotation(const Node& a, const Node& b);

Matrix element_stiffness_global(const FrameModel& model, int element);

// Full (unconstrained) stiffness matrix, symmetric positive
// semi-definite with rigid-body modes.
Matrix assemble_stiffness(const FrameModel& model);

// Applies the boundary conditions and Cholesky-factorizes once; solves
// are cheap and side-effect free after that.
class StaticSolver {
 public:
  explicit StaticSolver(const FrameModel& model);
  // full-length force vector in, full-length displacement out (fixed
  // DOFs come back as exact zeros)
  Vec solve(const Vec& force) const;
  const std::vector<int>& free_dofs() const { return free_; }

 private:
  std::vector<int> free_;
  Cholesky chol_;
  std::size_t dofs_ = 0;
};

struct LoadConfig {
  double material_min = 1.2;   // kN/m on the top chords
  double material_max = 6.5;
  double wind_speed_max = 54.0;  // m/s
  double wind_cutoff = 19.0;     // above this the line is cleared: material = 0
  double air_density = 1.225;    // kg/m^3
  double drag_coefficient = 1.2;
};

struct LoadScenario {
  double material_load = 0.0;  // kN/m
  double wind_speed = 0.0;     // m/s
  double wind_dir_x = 1.0;     // unit vector in the ground plane
  double wind_dir_y = 0.0;
};

// Consistent nodal forces: the material load is split across the two
// top chords (end shears plus fixed-end moments); wind becomes drag
// pressure q = rho/2 * Cd * v^2 on each exposed face, weighted by
// max(0, w.n) and the nodal tributary areas.
Vec build_load_vector(const FrameModel& model, const LoadScenario& scenario,
                      const LoadConfig& cfg);

Vec solve_static(const FrameModel& model, const StaticSolver& solver,
                 const LoadScenario& scenario, const LoadConfig& cfg);

// Tilt sensor channel: rotation about `axis` (0=rx, 1=ry, 2=rz) at a
// node.
struct SensorChannel {
  int node;
  int axis;
};

struct SensorSpec {
  std::vector<SensorChannel> channels;
  std::string describe() const;
};

// Seven tilt channels on three stations near quarter, mid and
// three-quarter span, mixing both sides of the deck.
SensorSpec default_sensor_spec(const FrameConfig& cfg);

Vec extract_sensors(const Vec& displacement, const SensorSpec& spec, double noise_std = 0.0,
                    Rng* rng = nullptr);

// Translational displacements only, 3 per node.
Vec translations(const FrameModel& model, const Vec& displacement);

struct Dataset {
  std::vector<Vec> sensors;
  std::vector<Vec> displacements;
  std::uint64_t model_hash = 0;
  std::uint64_t seed = 0;
  double noise_std = 0.0;
  int node_count = 0;
  std::string sensor_desc;
};

// Draws scenarios (uniform material load, uniform wind speed, uniform
// direction; wind above the cutoff clears the material load), solves
// each, and records sensor/displacement pairs. Deterministic for a
// given seed, for any thread count.
Dataset sample_dataset(const FrameModel& model, const SensorSpec& sensors, const LoadConfig& cfg,
                       int n_samples, std::uint64_t seed, double noise_std = 0.0,
                       int threads = 0);

struct SensorMapReport {
  int sensor_dim = 0;
  int output_dim = 0;
  int rank = 0;
  int null_dim = 0;
  double condition_number = 0.0;  // over the nonzero spectrum of A^T A
  Vec spectrum;                   // eigenvalues of A^T A, descending
};

// Spectral audit of a linear sensor-to-field map A (sensors = A * field
// would need A^+; we audit A^T A).
SensorMapReport analyze_sensor_map(const Matrix& a);

// Builds the least-squares linear map from sensor readings to the full
// displacement field over a basis of unit load patterns, then audits
// it. Shows the inverse problem is rank-limited by the sensor count.
SensorMapReport conditioning_diagnostic(const FrameModel& model, const StaticSolver& solver,
                                        const SensorSpec& sensors, const LoadConfig& cfg);

std::string sensor_map_summary(const SensorMapReport& r);

}  // namespace qfem::fem
