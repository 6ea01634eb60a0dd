#include "qfem/femgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "qfem/parallel.hpp"

namespace qfem::fem {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t hash_double(std::uint64_t h, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof(bits));
  return hash_mix(h, bits);
}

}  // namespace

std::uint64_t FrameModel::geometry_hash() const {
  std::uint64_t h = 0x5851f42d4c957f2dULL;
  for (const Node& n : nodes) {
    h = hash_double(h, n.x);
    h = hash_double(h, n.y);
    h = hash_double(h, n.z);
  }
  for (const Element& e : elements) {
    h = hash_mix(h, static_cast<std::uint64_t>(e.node_i));
    h = hash_mix(h, static_cast<std::uint64_t>(e.node_j));
  }
  for (int d : fixed_dofs) h = hash_mix(h, static_cast<std::uint64_t>(d));
  h = hash_double(h, section.elastic_modulus);
  h = hash_double(h, section.shear_modulus);
  h = hash_double(h, section.area);
  h = hash_double(h, section.inertia_y);
  h = hash_double(h, section.inertia_z);
  h = hash_double(h, section.torsion_constant);
  return h;
}

FrameModel build_frame(const FrameConfig& cfg) {
  if (cfg.bays < 1) throw ConfigError("build_frame: need at least one bay");
  if (!(cfg.span > 0.0 && cfg.width > 0.0 && cfg.height > 0.0))
    throw ConfigError("build_frame: span, width and height must be positive");

  FrameModel m;
  m.section = cfg.section;
  int frames = cfg.bays + 1;
  double dx = cfg.span / cfg.bays;

  // Corner order per cross frame: 0 bottom-left, 1 bottom-right,
  // 2 top-left, 3 top-right ("left" is y = 0).
  auto node_id = [](int frame, int corner) { return 4 * frame + corner; };
  for (int f = 0; f < frames; ++f) {
    double x = f * dx;
    m.nodes.push_back({x, 0.0, 0.0});
    m.nodes.push_back({x, cfg.width, 0.0});
    m.nodes.push_back({x, 0.0, cfg.height});
    m.nodes.push_back({x, cfg.width, cfg.height});
  }

  auto add = [&m](int a, int b) {
    m.elements.push_back({a, b});
    return static_cast<int>(m.elements.size()) - 1;
  };

  for (int f = 0; f < frames; ++f) {
    add(node_id(f, 0), node_id(f, 1));  // bottom transverse
    add(node_id(f, 2), node_id(f, 3));  // top transverse
    add(node_id(f, 0), node_id(f, 2));  // left post
    add(node_id(f, 1), node_id(f, 3));  // right post
  }
  for (int b = 0; b < cfg.bays; ++b) {
    add(node_id(b, 0), node_id(b + 1, 0));
    add(node_id(b, 1), node_id(b + 1, 1));
    m.top_chord_elements.push_back(add(node_id(b, 2), node_id(b + 1, 2)));
    m.top_chord_elements.push_back(add(node_id(b, 3), node_id(b + 1, 3)));
    // alternating diagonals: side planes and plan bracing
    if (b % 2 == 0) {
      add(node_id(b, 0), node_id(b + 1, 2));
      add(node_id(b, 1), node_id(b + 1, 3));
      add(node_id(b, 2), node_id(b + 1, 3));
      add(node_id(b, 0), node_id(b + 1, 1));
    } else {
      add(node_id(b, 2), node_id(b + 1, 0));
      add(node_id(b, 3), node_id(b + 1, 1));
      add(node_id(b, 3), node_id(b + 1, 2));
      add(node_id(b, 1), node_id(b + 1, 0));
    }
  }

  // Both end frames sit on fully fixed base corners.
  for (int node : {node_id(0, 0), node_id(0, 1), node_id(cfg.bays, 0), node_id(cfg.bays, 1)})
    for (int d = 0; d < kDofPerNode; ++d) m.fixed_dofs.push_back(kDofPerNode * node + d);
  std::sort(m.fixed_dofs.begin(), m.fixed_dofs.end());

  // Wind faces. Tributary areas put 60% of a column strip on the top
  // node and 40% on the bottom one (drag grows with height), which also
  // keeps the load basis from collapsing onto pure side-sway patterns.
  auto strip = [&](int f) { return (f == 0 || f == cfg.bays) ? dx / 2.0 : dx; };
  Face side_neg_y{0.0, -1.0, {}, {}};
  Face side_pos_y{0.0, 1.0, {}, {}};
  for (int f = 0; f < frames; ++f) {
    double a = strip(f) * cfg.height;
    side_neg_y.nodes.push_back(node_id(f, 0));
    side_neg_y.areas.push_back(0.4 * a);
    side_neg_y.nodes.push_back(node_id(f, 2));
    side_neg_y.areas.push_back(0.6 * a);
    side_pos_y.nodes.push_back(node_id(f, 1));
    side_pos_y.areas.push_back(0.4 * a);
    side_pos_y.nodes.push_back(node_id(f, 3));
    side_pos_y.areas.push_back(0.6 * a);
  }
  double end_area = cfg.width * cfg.height / 2.0;
  Face end_neg_x{-1.0, 0.0,
                 {node_id(0, 0), node_id(0, 1), node_id(0, 2), node_id(0, 3)},
                 {0.4 * end_area, 0.4 * end_area, 0.6 * end_area, 0.6 * end_area}};
  Face end_pos_x{1.0, 0.0,
                 {node_id(cfg.bays, 0), node_id(cfg.bays, 1), node_id(cfg.bays, 2),
                  node_id(cfg.bays, 3)},
                 {0.4 * end_area, 0.4 * end_area, 0.6 * end_area, 0.6 * end_area}};
  m.faces = {end_neg_x, end_pos_x, side_neg_y, side_pos_y};
  return m;
}

Matrix element_stiffness_local(const SectionProperties& s, double length) {
  if (!(length > 0.0)) throw NumericalError("element_stiffness_local: non-positive length");
  double L = length;
  double a = s.elastic_modulus * s.area / L;
  double t = s.shear_modulus * s.torsion_constant / L;
  double ez_ = s.elastic_modulus * s.inertia_z;
  double ey_ = s.elastic_modulus * s.inertia_y;
  double bz = 12.0 * ez_ / (L * L * L), cz = 6.0 * ez_ / (L * L);
  double dz = 4.0 * ez_ / L, ez2 = 2.0 * ez_ / L;
  double by = 12.0 * ey_ / (L * L * L), cy = 6.0 * ey_ / (L * L);
  double dy = 4.0 * ey_ / L, ey2 = 2.0 * ey_ / L;

  Matrix k(12, 12);
  auto set = [&k](int i, int j, double v) {
    k(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
    k(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
  };
  set(0, 0, a);
  set(0, 6, -a);
  set(6, 6, a);
  set(3, 3, t);
  set(3, 9, -t);
  set(9, 9, t);
  // bending in the local x-y plane (about z)
  set(1, 1, bz);
  set(1, 5, cz);
  set(1, 7, -bz);
  set(1, 11, cz);
  set(5, 5, dz);
  set(5, 7, -cz);
  set(5, 11, ez2);
  set(7, 7, bz);
  set(7, 11, -cz);
  set(11, 11, dz);
  // bending in the local x-z plane (about y); shear terms flip sign
  set(2, 2, by);
  set(2, 4, -cy);
  set(2, 8, -by);
  set(2, 10, -cy);
  set(4, 4, dy);
  set(4, 8, cy);
  set(4, 10, ey2);
  set(8, 8, by);
  set(8, 10, cy);
  set(10, 10, dy);
  return k;
}

Matrix element_rotation(const Node& a, const Node& b) {
  double dx = b.x - a.x, dy = b.y - a.y, dz = b.z - a.z;
  double len = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (!(len > 0.0)) throw NumericalError("element_rotation: coincident nodes");
  double xh[3] = {dx / len, dy / len, dz / len};
  // reference vector: global z, or global x for (near-)vertical members
  double aux[3] = {0.0, 0.0, 1.0};
  if (std::abs(xh[2]) > 0.9999) {
    aux[0] = 1.0;
    aux[2] = 0.0;
  }
  double yh[3] = {aux[1] * xh[2] - aux[2] * xh[1], aux[2] * xh[0] - aux[0] * xh[2],
                  aux[0] * xh[1] - aux[1] * xh[0]};
  double ny = std::sqrt(yh[0] * yh[0] + yh[1] * yh[1] + yh[2] * yh[2]);
  for (double& v : yh) v /= ny;
  double zh[3] = {xh[1] * yh[2] - xh[2] * yh[1], xh[2] * yh[0] - xh[0] * yh[2],
                  xh[0] * yh[1] - xh[1] * yh[0]};

  Matrix r(3, 3);
  for (int j = 0; j < 3; ++j) {
    r(0, static_cast<std::size_t>(j)) = xh[j];
    r(1, static_cast<std::size_t>(j)) = yh[j];
    r(2, static_cast<std::size_t>(j)) = zh[j];
  }
  return r;
}

namespace {

double element_length(const FrameModel& m, int e) {
  const Node& a = m.nodes[static_cast<std::size_t>(m.elements[static_cast<std::size_t>(e)].node_i)];
  const Node& b = m.nodes[static_cast<std::size_t>(m.elements[static_cast<std::size_t>(e)].node_j)];
  double dx = b.x - a.x, dy = b.y - a.y, dz = b.z - a.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

Matrix element_stiffness_global(const FrameModel& model, int element) {
  const Element& el = model.elements[static_cast<std::size_t>(element)];
  const Node& a = model.nodes[static_cast<std::size_t>(el.node_i)];
  const Node& b = model.nodes[static_cast<std::size_t>(el.node_j)];
  Matrix k = element_stiffness_local(model.section, element_length(model, element));
  Matrix r = element_rotation(a, b);

  // T = blkdiag(R, R, R, R); result = T^T k T
  Matrix t(12, 12);
  for (int blk = 0; blk < 4; ++blk)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        t(3 * static_cast<std::size_t>(blk) + i, 3 * static_cast<std::size_t>(blk) + j) = r(i, j);
  return transpose(t) * k * t;
}

Matrix assemble_stiffness(const FrameModel& model) {
  if (model.nodes.empty() || model.elements.empty())
    throw DataError("assemble_stiffness: empty model");
  int ndof = model.dof_count();
  Matrix k(static_cast<std::size_t>(ndof), static_cast<std::size_t>(ndof));
  for (int e = 0; e < static_cast<int>(model.elements.size()); ++e) {
    Matrix ke = element_stiffness_global(model, e);
    const Element& el = model.elements[static_cast<std::size_t>(e)];
    int map[12];
    for (int d = 0; d < 6; ++d) {
      map[d] = kDofPerNode * el.node_i + d;
      map[6 + d] = kDofPerNode * el.node_j + d;
    }
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j)
        k(static_cast<std::size_t>(map[i]), static_cast<std::size_t>(map[j])) +=
            ke(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  return k;
}

namespace {

Cholesky factorize_constrained(const FrameModel& model, std::vector<int>& free_out) {
  if (model.fixed_dofs.size() < 6)
    throw DataError(
        "static solver: fewer than 6 constrained DOFs, the structure has rigid-body modes");
  int ndof = model.dof_count();
  std::vector<bool> fixed(static_cast<std::size_t>(ndof), false);
  for (int d : model.fixed_dofs) {
    if (d < 0 || d >= ndof) throw DataError("static solver: fixed DOF out of range");
    fixed[static_cast<std::size_t>(d)] = true;
  }
  free_out.clear();
  for (int d = 0; d < ndof; ++d)
    if (!fixed[static_cast<std::size_t>(d)]) free_out.push_back(d);

  Matrix k = assemble_stiffness(model);
  Matrix kr(free_out.size(), free_out.size());
  for (std::size_t i = 0; i < free_out.size(); ++i)
    for (std::size_t j = 0; j < free_out.size(); ++j)
      kr(i, j) = k(static_cast<std::size_t>(free_out[i]), static_cast<std::size_t>(free_out[j]));
  try {
    return Cholesky(kr);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("static solver: stiffness factorization failed (") +
                         e.what() + "); check supports and connectivity");
  }
}

}  // namespace

StaticSolver::StaticSolver(const FrameModel& model)
    : chol_(factorize_constrained(model, free_)),
      dofs_(static_cast<std::size_t>(model.dof_count())) {}

Vec StaticSolver::solve(const Vec& force) const {
  if (force.size() != dofs_) throw DataError("static solve: force vector length mismatch");
  Vec fr(free_.size());
  for (std::size_t i = 0; i < free_.size(); ++i)
    fr[i] = force[static_cast<std::size_t>(free_[i])];
  Vec ur = chol_.solve(fr);
  Vec u(force.size(), 0.0);
  for (std::size_t i = 0; i < free_.size(); ++i)
    u[static_cast<std::size_t>(free_[i])] = ur[i];
  return u;
}

Vec build_load_vector(const FrameModel& model, const LoadScenario& scenario,
                      const LoadConfig& cfg) {
  if (scenario.material_load < 0.0) throw DataError("load scenario: negative material load");
  if (scenario.wind_speed < 0.0) throw DataError("load scenario: negative wind speed");
  double dn = std::hypot(scenario.wind_dir_x, scenario.wind_dir_y);
  double wx = 0.0, wy = 0.0;
  if (scenario.wind_speed > 0.0) {
    if (!(dn > 0.0)) throw DataError("load scenario: wind direction is a zero vector");
    wx = scenario.wind_dir_x / dn;
    wy = scenario.wind_dir_y / dn;
  }

  Vec f(static_cast<std::size_t>(model.dof_count()), 0.0);

  // Material load: w/2 per top chord in global -z, as consistent end
  // shears and fixed-end moments.
  double w = scenario.material_load * 1e3 / 2.0;  // kN/m -> N/m, split over two chords
  if (w > 0.0) {
    for (int e : model.top_chord_elements) {
      const Element& el = model.elements[static_cast<std::size_t>(e)];
      const Node& a = model.nodes[static_cast<std::size_t>(el.node_i)];
      const Node& b = model.nodes[static_cast<std::size_t>(el.node_j)];
      double len = element_length(model, e);
      Matrix r = element_rotation(a, b);
      // global (0, 0, -w) in local components
      double q[3];
      for (int i = 0; i < 3; ++i) q[i] = r(static_cast<std::size_t>(i), 2) * (-w);
      double fi[6] = {q[0] * len / 2.0, q[1] * len / 2.0,  q[2] * len / 2.0,
                      0.0,              -q[2] * len * len / 12.0, q[1] * len * len / 12.0};
      double fj[6] = {q[0] * len / 2.0, q[1] * len / 2.0, q[2] * len / 2.0,
                      0.0,              q[2] * len * len / 12.0, -q[1] * len * len / 12.0};
      // back to global, forces and moments separately
      for (int c = 0; c < 2; ++c) {
        const double* fl = c == 0 ? fi : fj;
        int node = c == 0 ? el.node_i : el.node_j;
        for (int gi = 0; gi < 3; ++gi) {
          double force = 0.0, moment = 0.0;
          for (int li = 0; li < 3; ++li) {
            force += r(static_cast<std::size_t>(li), static_cast<std::size_t>(gi)) * fl[li];
            moment += r(static_cast<std::size_t>(li), static_cast<std::size_t>(gi)) * fl[3 + li];
          }
          f[static_cast<std::size_t>(kDofPerNode * node + gi)] += force;
          f[static_cast<std::size_t>(kDofPerNode * node + 3 + gi)] += moment;
        }
      }
    }
  }

  // Wind drag on every face the flow hits, along the wind direction.
  if (scenario.wind_speed > 0.0) {
    double q = 0.5 * cfg.air_density * cfg.drag_coefficient * scenario.wind_speed *
               scenario.wind_speed;
    for (const Face& face : model.faces) {
      double exposure = -(wx * face.nx + wy * face.ny);
      if (exposure <= 0.0) continue;
      for (std::size_t i = 0; i < face.nodes.size(); ++i) {
        double p = q * face.areas[i] * exposure;
        f[static_cast<std::size_t>(kDofPerNode * face.nodes[i] + 0)] += p * wx;
        f[static_cast<std::size_t>(kDofPerNode * face.nodes[i] + 1)] += p * wy;
      }
    }
  }
  return f;
}

Vec solve_static(const FrameModel& model, const StaticSolver& solver,
                 const LoadScenario& scenario, const LoadConfig& cfg) {
  return solver.solve(build_load_vector(model, scenario, cfg));
}

std::string SensorSpec::describe() const {
  static const char* axis_names[3] = {"rx", "ry", "rz"};
  std::ostringstream os;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (i) os << ';';
    os << 'n' << channels[i].node << ':' << axis_names[channels[i].axis];
  }
  return os.str();
}

SensorSpec default_sensor_spec(const FrameConfig& cfg) {
  auto station = [&cfg](double frac) {
    return static_cast<int>(std::lround(frac * cfg.bays));
  };
  int f1 = station(0.25), f2 = station(0.5), f3 = station(0.75);
  // top-left at quarter span (3 axes), top-right at midspan, top-left at
  // three-quarter span (2 axes each): 7 channels across both sides
  int n1 = 4 * f1 + 2, n2 = 4 * f2 + 3, n3 = 4 * f3 + 2;
  SensorSpec spec;
  spec.channels = {{n1, 0}, {n1, 1}, {n1, 2}, {n2, 0}, {n2, 1}, {n3, 0}, {n3, 1}};
  return spec;
}

Vec extract_sensors(const Vec& displacement, const SensorSpec& spec, double noise_std,
                    Rng* rng) {
  if (noise_std < 0.0) throw ConfigError("extract_sensors: negative noise level");
  if (noise_std > 0.0 && rng == nullptr)
    throw ConfigError("extract_sensors: noise requested without a generator");
  Vec out;
  out.reserve(spec.channels.size());
  for (const SensorChannel& ch : spec.channels) {
    std::size_t idx = static_cast<std::size_t>(kDofPerNode * ch.node + 3 + ch.axis);
    if (ch.axis < 0 || ch.axis > 2 || idx >= displacement.size())
      throw DataError("extract_sensors: channel out of range");
    double v = displacement[idx];
    if (noise_std > 0.0) v += noise_std * rng->normal();
    out.push_back(v);
  }
  return out;
}

Vec translations(const FrameModel& model, const Vec& displacement) {
  if (displacement.size() != static_cast<std::size_t>(model.dof_count()))
    throw DataError("translations: displacement length mismatch");
  Vec out;
  out.reserve(3 * model.nodes.size());
  for (std::size_t n = 0; n < model.nodes.size(); ++n)
    for (int d = 0; d < 3; ++d)
      out.push_back(displacement[kDofPerNode * n + static_cast<std::size_t>(d)]);
  return out;
}

Dataset sample_dataset(const FrameModel& model, const SensorSpec& sensors, const LoadConfig& cfg,
                       int n_samples, std::uint64_t seed, double noise_std, int threads) {
  if (n_samples < 1) throw ConfigError("sample_dataset: n_samples must be positive");
  if (!(cfg.material_min >= 0.0 && cfg.material_max >= cfg.material_min))
    throw ConfigError("sample_dataset: bad material load range");
  if (!(cfg.wind_speed_max >= 0.0)) throw ConfigError("sample_dataset: bad wind speed range");

  StaticSolver solver(model);

  // All scenario draws come from one sequential stream; solves then run
  // in parallel into per-sample slots.
  Rng rng(derive_seed(seed, "scenarios"));
  std::vector<LoadScenario> scenarios(static_cast<std::size_t>(n_samples));
  for (LoadScenario& s : scenarios) {
    s.material_load = rng.uniform(cfg.material_min, cfg.material_max);
    s.wind_speed = rng.uniform(0.0, cfg.wind_speed_max);
    double theta = rng.uniform(0.0, 2.0 * kPi);
    s.wind_dir_x = std::cos(theta);
    s.wind_dir_y = std::sin(theta);
    if (s.wind_speed > cfg.wind_cutoff) s.material_load = 0.0;  // line cleared in storm
  }

  Dataset ds;
  ds.sensors.resize(static_cast<std::size_t>(n_samples));
  ds.displacements.resize(static_cast<std::size_t>(n_samples));
  ds.model_hash = model.geometry_hash();
  ds.seed = seed;
  ds.noise_std = noise_std;
  ds.node_count = static_cast<int>(model.nodes.size());
  ds.sensor_desc = sensors.describe();

  parallel_for(
      static_cast<std::size_t>(n_samples),
      [&](std::size_t i) {
        Vec u = solve_static(model, solver, scenarios[i], cfg);
        Rng noise_rng(derive_seed(seed, "noise:" + std::to_string(i)));
        ds.sensors[i] =
            extract_sensors(u, sensors, noise_std, noise_std > 0.0 ? &noise_rng : nullptr);
        ds.displacements[i] = translations(model, u);
      },
      threads);
  return ds;
}

SensorMapReport analyze_sensor_map(const Matrix& a) {
  if (a.empty()) throw DataError("analyze_sensor_map: empty matrix");
  std::size_t s = a.rows(), f = a.cols();
  // Nonzero spectrum of A^T A equals that of A A^T; use the smaller Gram.
  bool small_rows = s <= f;
  std::size_t g = small_rows ? s : f;
  Matrix gram(g, g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = i; j < g; ++j) {
      double acc = 0.0;
      if (small_rows)
        for (std::size_t k = 0; k < f; ++k) acc += a(i, k) * a(j, k);
      else
        for (std::size_t k = 0; k < s; ++k) acc += a(k, i) * a(k, j);
      gram(i, j) = acc;
      gram(j, i) = acc;
    }
  EigenDecomposition eig = jacobi_eigen(gram);
  double lmax = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.front();
  if (!(lmax > 0.0)) throw DataError("analyze_sensor_map: zero map");

  SensorMapReport r;
  r.sensor_dim = static_cast<int>(s);
  r.output_dim = static_cast<int>(f);
  double tol = 1e-12 * lmax;
  double lmin_nonzero = lmax;
  for (double lam : eig.eigenvalues) {
    if (lam > tol) {
      ++r.rank;
      lmin_nonzero = lam;
    }
  }
  r.null_dim = static_cast<int>(f) - r.rank;
  r.condition_number = lmax / lmin_nonzero;
  r.spectrum = eig.eigenvalues;
  return r;
}

SensorMapReport conditioning_diagnostic(const FrameModel& model, const StaticSolver& solver,
                                        const SensorSpec& sensors, const LoadConfig& cfg) {
  // Unit basis patterns: material load alone, then wind from eight
  // compass directions.
  std::vector<LoadScenario> basis;
  basis.push_back({1.0, 0.0, 1.0, 0.0});
  for (int k = 0; k < 8; ++k) {
    double th = kPi * k / 4.0;
    basis.push_back({0.0, 20.0, std::cos(th), std::sin(th)});
  }

  std::size_t nb = basis.size();
  std::size_t nf = 3 * model.nodes.size();
  std::size_t ns = sensors.channels.size();
  Matrix x(nf, nb), y(ns, nb);
  for (std::size_t b = 0; b < nb; ++b) {
    Vec u = solve_static(model, solver, basis[b], cfg);
    Vec tr = translations(model, u);
    Vec sr = extract_sensors(u, sensors);
    for (std::size_t i = 0; i < nf; ++i) x(i, b) = tr[i];
    for (std::size_t i = 0; i < ns; ++i) y(i, b) = sr[i];
  }

  // A = Y X^+ with X^+ = V L^+ V^T X^T from the eigendecomposition of
  // the small Gram X^T X.
  Matrix g = transpose(x) * x;
  EigenDecomposition eig = jacobi_eigen(g);
  double lmax = eig.eigenvalues.front();
  if (!(lmax > 0.0)) throw DataError("conditioning_diagnostic: degenerate load basis");
  double tol = 1e-12 * lmax;
  Matrix linv(nb, nb);
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < nb; ++k) {
        if (eig.eigenvalues[k] <= tol) continue;
        acc += eig.eigenvectors(i, k) * eig.eigenvectors(j, k) / eig.eigenvalues[k];
      }
      linv(i, j) = acc;
    }
  Matrix a = (y * linv) * transpose(x);
  return analyze_sensor_map(a);
}

std::string sensor_map_summary(const SensorMapReport& r) {
  std::ostringstream os;
  os << "sensor-to-field map: " << r.sensor_dim << " channels onto " << r.output_dim
     << " displacement components\n"
     << "rank " << r.rank << ", null-space dimension " << r.null_dim
     << ", condition number of the normal matrix " << r.condition_number << "\n"
     << "direct inversion is underdetermined: " << r.null_dim
     << " field directions are invisible to the sensors, so recovery needs a "
        "learned prior over load regimes";
  return os.str();
}

}  // namespace qfem::fem
