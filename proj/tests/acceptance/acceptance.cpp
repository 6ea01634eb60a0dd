// Acceptance gate. Each criterion checks one externally stated
// guarantee of the toolkit against an independent oracle (closed forms,
// brute-force reimplementations, finite differences, or byte-level
// checksums of CLI artifacts) and prints a single PASS/FAIL line.
//
// usage: acceptance <criterion> [--cli PATH] [--work-dir PATH]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"
#include "qfem/checkpoint.hpp"
#include "qfem/clustering.hpp"
#include "qfem/config.hpp"
#include "qfem/dataset.hpp"
#include "qfem/embed.hpp"
#include "qfem/experiment.hpp"
#include "qfem/femgen.hpp"
#include "qfem/model.hpp"
#include "qfem/qsim.hpp"
#include "qfem/rng.hpp"
#include "qfem/train.hpp"

namespace fs = std::filesystem;
using namespace qfem;

namespace {

struct Args {
  std::string criterion;
  std::string cli;
  std::string work_dir = "acceptance_work";
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

int g_failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    ++g_failures;
    std::cout << "  check failed: " << what << "\n";
  }
}

void expect_le(double value, double bound, const std::string& what) {
  if (!(value <= bound)) {
    ++g_failures;
    std::cout << "  check failed: " << what << " (" << value << " > " << bound << ")\n";
  }
}

struct CmdResult {
  int code = -1;
  std::string output;
};

CmdResult run_cmd(const std::string& cmd) {
  CmdResult r;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
  int status = pclose(pipe);
  r.code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  return r;
}

CmdResult run_cli_checked(const Args& args, const std::string& rest) {
  CmdResult r = run_cmd(args.cli + " " + rest);
  if (r.code != 0) {
    ++g_failures;
    std::cout << "  cli command failed (exit " << r.code << "): " << rest << "\n"
              << r.output << "\n";
  }
  return r;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
  if (!os) throw DataError("cannot write " + path.string());
}

std::uint64_t fnv1a_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot hash " + path.string());
  std::uint64_t h = 1469598103934665603ull;
  char c;
  while (is.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

fs::path fresh_dir(const Args& args, const std::string& name) {
  fs::path dir = fs::path(args.work_dir) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// value rounded to two significant figures, as (tenths, exponent):
// 35040 -> (35, 4) meaning 3.5e4
std::pair<long, int> two_sig(double x) {
  int e = static_cast<int>(std::floor(std::log10(std::abs(x))));
  long t = std::lround(x / std::pow(10.0, e - 1));
  if (t == 100) {
    t = 10;
    e += 1;
  }
  return {t, e};
}

double frobenius(const Matrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

// ---------------------------------------------------------------- embedding

bool crit_embedding_invariants(const Args&) {
  Timer timer;
  Rng rng(2024);
  const int n_vectors = 1000;

  std::vector<embed::PolyConfig> combos;
  for (int degree : {2, 3})
    for (embed::TermMode mode : {embed::TermMode::kAllUpToDegree,
                                 embed::TermMode::kExactDegreeOnly}) {
      embed::PolyConfig pc;
      pc.degree = degree;
      pc.terms = mode;
      combos.push_back(pc);
    }

  double worst_norm = 0.0, worst_trace = 0.0, worst_eig = 0.0;
  for (int i = 0; i < n_vectors; ++i) {
    Vec x(7);
    double scale = std::pow(10.0, rng.uniform(-2.0, 2.0));
    for (double& v : x) v = scale * rng.normal();
    for (const embed::PolyConfig& pc : combos) {
      Matrix rho = embed::embed_density(x, pc, 1e-6);
      embed::EmbeddedState st = embed::hs_vectorize(rho);

      double norm = 0.0;
      for (double a : st.amplitudes) norm += a * a;
      worst_norm = std::max(worst_norm, std::abs(std::sqrt(norm) - 1.0));

      double trace = 0.0;
      for (std::size_t d = 0; d < rho.rows(); ++d) trace += rho(d, d);
      worst_trace = std::max(worst_trace, std::abs(trace - 1.0));

      EigenDecomposition eig = jacobi_eigen(rho);
      worst_eig = std::max(worst_eig, -eig.eigenvalues.back());
    }
  }

  std::cout << "  " << n_vectors << " vectors x " << combos.size()
            << " embedding configs: worst |norm-1| " << worst_norm << ", worst |trace-1| "
            << worst_trace << ", most negative eigenvalue " << -worst_eig << "\n";
  expect_le(worst_norm, 1e-10, "state norm deviation");
  expect_le(worst_trace, 1e-12, "density trace deviation");
  expect_le(worst_eig, 1e-10, "negative eigenvalue magnitude");
  double dt = timer.seconds();
  std::cout << "  runtime " << dt << " s\n";
  expect_le(dt, 60.0, "runtime budget");
  return g_failures == 0;
}

// -------------------------------------------------------------- matrix sqrt

bool crit_matrix_sqrt(const Args&) {
  Timer timer;
  Rng rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 2 + static_cast<std::size_t>(trial) * 62 / 99;  // spans 2..64
    double scale = std::pow(10.0, (trial % 7) - 3.0);               // 1e-3 .. 1e3
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = scale * rng.normal();
    // SPD by construction, spread conditioning via the ridge term
    Matrix m = transpose(a) * a;
    double ridge = 1e-6 * scale * scale * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) += ridge;

    Matrix s = embed::matrix_sqrt(m);
    Matrix back = s * s;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) back(i, j) -= m(i, j);
    worst = std::max(worst, frobenius(back) / frobenius(m));
  }
  std::cout << "  100 SPD matrices up to 64x64: worst relative ||S*S - M||_F = " << worst
            << "\n";
  expect_le(worst, 1e-8, "square-root reconstruction error");
  double dt = timer.seconds();
  std::cout << "  runtime " << dt << " s\n";
  expect_le(dt, 60.0, "runtime budget");
  return g_failures == 0;
}

// ---------------------------------------------------------- quantum gradients

bool crit_quantum_gradients(const Args&) {
  Timer timer;
  Rng rng(4242);
  const double h = 1e-4;
  double worst = 0.0;

  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + static_cast<int>(rng.index(6));   // 1..6
    int layers = 1 + static_cast<int>(rng.index(3));  // 1..3
    std::vector<qsim::Axis> axes;
    while (axes.empty()) {
      axes.clear();
      for (qsim::Axis a : {qsim::Axis::X, qsim::Axis::Y, qsim::Axis::Z})
        if (rng.uniform() < 0.5) axes.push_back(a);
    }
    qsim::Topology topo = rng.uniform() < 0.5 ? qsim::Topology::Ring : qsim::Topology::Chain;
    qsim::CircuitParams params = qsim::random_circuit(n, layers, axes, topo, rng);
    qsim::ObservableSet obs = qsim::ObservableSet::all_z(n);

    Vec input_angles(static_cast<std::size_t>(n));
    for (double& v : input_angles) v = rng.uniform(-3.0, 3.0);
    qsim::StateVector initial = qsim::init_zero(n);
    qsim::angle_embed(initial, input_angles);

    Vec weights(static_cast<std::size_t>(n));
    for (double& v : weights) v = rng.uniform(-1.0, 1.0);

    Vec ps = qsim::param_shift_grad(initial, params, obs, weights);

    auto value = [&](const qsim::CircuitParams& p) {
      Vec feats = qsim::measure_features(qsim::run_circuit(initial, p), obs);
      double s = 0.0;
      for (std::size_t q = 0; q < feats.size(); ++q) s += weights[q] * feats[q];
      return s;
    };
    for (std::size_t i = 0; i < params.angles.size(); ++i) {
      qsim::CircuitParams p = params;
      p.angles[i] += h;
      double up = value(p);
      p.angles[i] -= 2.0 * h;
      double dn = value(p);
      worst = std::max(worst, std::abs(ps[i] - (up - dn) / (2.0 * h)));
    }
  }
  std::cout << "  100 random circuits (n<=6, L<=3): worst |shift - fd| = " << worst << "\n";
  expect_le(worst, 1e-6, "parameter-shift vs finite differences");

  // single-qubit Ry from |0>: <Z> = cos(theta), gradient -sin(theta)
  double worst_ry = 0.0;
  qsim::CircuitParams ry;
  ry.n_qubits = 1;
  ry.layers = 1;
  ry.axes = {qsim::Axis::Y};
  ry.angles = {0.0};
  qsim::ObservableSet z0 = qsim::ObservableSet::all_z(1);
  const double pi = 3.14159265358979323846;
  for (int k = 0; k < 64; ++k) {
    double theta = -pi + 2.0 * pi * k / 64.0;
    ry.angles[0] = theta;
    Vec g = qsim::param_shift_grad(qsim::init_zero(1), ry, z0, Vec{1.0});
    worst_ry = std::max(worst_ry, std::abs(g[0] - (-std::sin(theta))));
  }
  std::cout << "  Ry sweep at 64 angles: worst |shift + sin| = " << worst_ry << "\n";
  expect_le(worst_ry, 1e-12, "Ry analytic gradient");

  double dt = timer.seconds();
  std::cout << "  runtime " << dt << " s\n";
  expect_le(dt, 120.0, "runtime budget");
  return g_failures == 0;
}

// ------------------------------------------------------- end-to-end gradients

bool crit_end_to_end(const Args&) {
  Timer timer;
  for (nn::Variant v : nn::all_variants()) {
    nn::VariantSpec sp;
    sp.variant = v;
    sp.sensor_dim = 4;
    sp.output_dim = 20;
    sp.hidden = {8, 6};
    sp.cluster_k = 3;
    sp.qubits = 4;
    sp.layers = 2;
    sp.poly.degree = 1;             // 4-dim expansion: amplitude variant
    sp.poly.include_bias = false;   // derives exactly 4 qubits
    Rng rng(900 + static_cast<int>(v));
    nn::HybridModel m = nn::build_variant(sp, rng);
    if (m.quantum) {
      expect(m.quantum->params.n_qubits <= 4,
             std::string(nn::variant_name(v)) + ": qubit budget");
    }

    Vec x(4);
    for (double& s : x) s = rng.normal();
    Vec prepared = m.prepare_input(x);
    Vec c(20);
    for (double& w : c) w = rng.uniform(-1.0, 1.0);

    nn::Workspace ws;
    m.forward_prepared(prepared, &ws);
    Vec grad(m.param_count(), 0.0);
    m.backward_prepared(ws, c, grad);

    auto value = [&]() {
      Vec out = m.forward_prepared(prepared);
      double s = 0.0;
      for (std::size_t j = 0; j < out.size(); ++j) s += c[j] * out[j];
      return s;
    };

    Vec p = m.get_params();
    const double h = 1e-5;
    double worst_rel = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      Vec pp = p;
      pp[i] += h;
      m.set_params(pp);
      double up = value();
      pp[i] -= 2.0 * h;
      m.set_params(pp);
      double dn = value();
      double fd = (up - dn) / (2.0 * h);
      double rel = std::abs(grad[i] - fd) / (std::abs(grad[i]) + std::abs(fd) + 1e-9);
      worst_rel = std::max(worst_rel, rel);
    }
    m.set_params(p);
    std::cout << "  " << nn::variant_name(v) << ": " << p.size()
              << " params, worst relative gradient error " << worst_rel << "\n";
    expect_le(worst_rel, 1e-5, std::string(nn::variant_name(v)) + " gradient check");
  }
  double dt = timer.seconds();
  std::cout << "  runtime " << dt << " s\n";
  expect_le(dt, 600.0, "runtime budget");
  return g_failures == 0;
}

// ------------------------------------------------------------------ fe oracle

bool crit_fe_oracle(const Args&) {
  Timer timer;

  // cantilever vs closed form
  const double L = 2.7, P = 1200.0;
  fem::FrameModel cant;
  cant.nodes = {{0.0, 0.0, 0.0}, {L, 0.0, 0.0}};
  cant.elements = {{0, 1}};
  cant.fixed_dofs = {0, 1, 2, 3, 4, 5};
  fem::StaticSolver cant_solver(cant);
  Vec f(12, 0.0);
  f[8] = P;
  Vec u = cant_solver.solve(f);
  double want = P * L * L * L / (3.0 * cant.section.elastic_modulus * cant.section.inertia_y);
  double tip_err = std::abs(u[8] - want) / want;
  std::cout << "  cantilever tip: " << u[8] << " vs PL^3/3EI = " << want << " (rel err "
            << tip_err << ")\n";
  expect_le(tip_err, 1e-8, "cantilever closed form");

  // reciprocity and linearity on the full frame
  fem::FrameConfig cfg;
  fem::FrameModel frame = fem::build_frame(cfg);
  fem::StaticSolver solver(frame);
  std::size_t nd = static_cast<std::size_t>(frame.dof_count());

  Rng rng(31);
  double worst_recip = 0.0;
  for (int pair = 0; pair < 6; ++pair) {
    // random free translation DOFs
    std::size_t di, dj;
    do di = rng.index(nd); while (std::binary_search(frame.fixed_dofs.begin(),
                                                     frame.fixed_dofs.end(),
                                                     static_cast<int>(di)));
    do dj = rng.index(nd); while (dj == di ||
                                  std::binary_search(frame.fixed_dofs.begin(),
                                                     frame.fixed_dofs.end(),
                                                     static_cast<int>(dj)));
    Vec ei(nd, 0.0), ej(nd, 0.0);
    ei[di] = 1.0;
    ej[dj] = 1.0;
    double uij = solver.solve(ei)[dj];
    double uji = solver.solve(ej)[di];
    double denom = std::max(std::abs(uij), std::abs(uji));
    if (denom > 0.0) worst_recip = std::max(worst_recip, std::abs(uij - uji) / denom);
  }
  std::cout << "  reciprocity over 6 DOF pairs: worst relative asymmetry " << worst_recip
            << "\n";
  expect_le(worst_recip, 1e-10, "reciprocity");

  Vec f1(nd, 0.0), f2(nd, 0.0);
  for (std::size_t i = 0; i < nd; ++i) {
    f1[i] = rng.normal();
    f2[i] = rng.normal();
  }
  Vec u1 = solver.solve(f1), u2 = solver.solve(f2);
  Vec combo(nd);
  for (std::size_t i = 0; i < nd; ++i) combo[i] = 1.3 * f1[i] - 0.7 * f2[i];
  Vec uc = solver.solve(combo);
  double umax = 0.0, worst_lin = 0.0;
  for (double v : uc) umax = std::max(umax, std::abs(v));
  for (std::size_t i = 0; i < nd; ++i)
    worst_lin = std::max(worst_lin, std::abs(uc[i] - (1.3 * u1[i] - 0.7 * u2[i])));
  worst_lin /= umax;
  std::cout << "  linearity: worst combination residual (relative) " << worst_lin << "\n";
  expect_le(worst_lin, 1e-10, "linearity");

  double dt = timer.seconds();
  std::cout << "  runtime " << dt << " s\n";
  expect_le(dt, 60.0, "runtime budget");
  return g_failures == 0;
}

// ----------------------------------------------------------------- complexity

bool crit_complexity(const Args& args) {
  ComplexityReport rep = complexity_report(ComplexityDims{});
  std::cout << "  library figures: classical " << rep.classical_macs << ", hybrid "
            << rep.hybrid_macs << ", ratio " << rep.ratio << "\n";
  expect(rep.classical_macs == 35040.0, "classical MAC count is 35040");
  expect(rep.hybrid_macs == 87780.0, "hybrid MAC count is 87780");
  expect(two_sig(rep.classical_macs) == std::make_pair(35l, 4), "classical ~ 3.5e4");
  expect(two_sig(rep.hybrid_macs) == std::make_pair(88l, 4), "hybrid ~ 8.8e4");
  expect(two_sig(rep.ratio) == std::make_pair(25l, 0), "ratio ~ 2.5");

  if (!args.cli.empty()) {
    CmdResult r = run_cli_checked(args, "complexity");
    expect(r.output.find("35040") != std::string::npos, "cli reports 35040");
    expect(r.output.find("87780") != std::string::npos, "cli reports 87780");
    expect(r.output.find("2.5051") != std::string::npos, "cli reports ratio 2.5051");
  } else {
    ++g_failures;
    std::cout << "  missing --cli\n";
  }
  return g_failures == 0;
}

// ----------------------------------------------------------------- desk scale

std::string desk_config_json(const fs::path& out_dir) {
  std::ostringstream os;
  os << "{\n"
     << "  \"seed\": 42,\n"
     << "  \"out_dir\": \"" << out_dir.string() << "\",\n"
     << "  \"threads\": 0,\n"
     << "  \"data\": {\"samples\": 2000, \"noise_std\": 0.0},\n"
     << "  \"embedding\": {\"degree\": 1, \"include_bias\": true},\n"
     << "  \"quantum\": {\"qubits\": 6, \"layers\": 2, \"axes\": [\"y\"], "
        "\"topology\": \"ring\"},\n"
     << "  \"model\": {\"variants\": [\"BaselineMLP\", \"PolySPD_HC_Clustered\"], "
        "\"hidden\": [64, 32], \"cluster_k\": 7},\n"
     << "  \"train\": {\"learning_rate\": 0.001, \"batch_size\": 32, "
        "\"max_epochs\": 300, \"patience\": 30}\n"
     << "}\n";
  return os.str();
}

bool crit_desk_scale(const Args& args) {
  Timer timer;
  if (args.cli.empty()) {
    std::cout << "  missing --cli\n";
    ++g_failures;
    return false;
  }
  fs::path dir = fresh_dir(args, "desk");
  fs::path out = dir / "out";
  fs::path cfg_path = dir / "config.json";
  write_file(cfg_path, desk_config_json(out));

  run_cli_checked(args, "gen-data --config " + cfg_path.string());
  CmdResult cmp = run_cli_checked(args, "compare --config " + cfg_path.string());
  if (g_failures) return false;

  // table emitted with the five metric columns
  for (const char* col : {"Model", "MSE", "RMSE", "R2", "NRMSE(range)", "NRMSE(std)"})
    expect(cmp.output.find(col) != std::string::npos,
           std::string("comparison table column ") + col);
  expect(cmp.output.find("BaselineMLP") != std::string::npos, "baseline row present");
  expect(cmp.output.find("PolySPD_HC_Clustered") != std::string::npos, "hybrid row present");

  // held-out scores from the metrics csv
  std::ifstream csv(out / "compare_metrics.csv");
  expect(static_cast<bool>(csv), "compare_metrics.csv written");
  std::string line;
  std::getline(csv, line);  // header
  std::map<std::string, std::vector<double>> rows;
  while (std::getline(csv, line)) {
    std::stringstream ss(line);
    std::string name, cell;
    std::getline(ss, name, ',');
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    rows[name] = vals;
  }
  // columns: params,epochs,best_val_loss,mse,rmse,r2,nrmse_range,nrmse_std,raw_rmse
  for (const char* name : {"BaselineMLP", "PolySPD_HC_Clustered"}) {
    auto it = rows.find(name);
    if (it == rows.end()) {
      ++g_failures;
      std::cout << "  missing csv row for " << name << "\n";
      continue;
    }
    double mse = it->second[3], rmse = it->second[4], r2 = it->second[5];
    std::cout << "  " << name << ": held-out r2 = " << r2 << ", rmse = " << rmse << "\n";
    expect(r2 >= 0.95, std::string(name) + " reaches r2 >= 0.95");
    expect_le(std::abs(rmse - std::sqrt(mse)), 1e-12 * std::max(1.0, rmse),
              std::string(name) + " rmse = sqrt(mse)");
  }

  // brute-force metric verification on a freshly trained checkpoint
  run_cli_checked(args, "train --config " + cfg_path.string() + " --variant BaselineMLP");
  nn::HybridModel model = load_checkpoint((out / "checkpoint_BaselineMLP.json").string());
  fem::Dataset ds = fem::read_dataset_csv((out / "dataset.csv").string());
  expect(ds.sensors.size() == 2000u, "dataset has 2000 samples");
  expect(ds.displacements.front().size() == 132u, "132 output components");
  expect(ds.node_count == 44, "44-node frame");

  nn::SplitIndices split =
      nn::split_dataset(ds.sensors.size(), 0.2, 0.2, derive_seed(42, "split"));
  std::vector<Vec> preds, tgts;
  for (std::size_t idx : split.test) {
    preds.push_back(model.predict_standardized(ds.sensors[idx]));
    tgts.push_back(model.target_std.transform(ds.displacements[idx]));
  }

  // independent pooled-metric recomputation, plain loops
  double sum = 0.0;
  std::size_t count = 0;
  for (const Vec& t : tgts)
    for (double v : t) {
      sum += v;
      ++count;
    }
  double mean = sum / static_cast<double>(count);
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < tgts.size(); ++i)
    for (std::size_t j = 0; j < tgts[i].size(); ++j) {
      double e = preds[i][j] - tgts[i][j];
      sse += e * e;
      double d = tgts[i][j] - mean;
      sst += d * d;
    }
  double brute_r2 = 1.0 - sse / sst;
  double brute_mse = sse / static_cast<double>(count);

  std::ifstream mjson(out / "metrics_BaselineMLP.json");
  nlohmann::json mj = nlohmann::json::parse(mjson);
  double rep_r2 = mj["test"]["r2"].get<double>();
  double rep_mse = mj["test"]["mse"].get<double>();
  double rep_rmse = mj["test"]["rmse"].get<double>();
  std::cout << "  brute-force r2 " << brute_r2 << " vs reported " << rep_r2 << "\n";
  expect_le(std::abs(brute_r2 - rep_r2), 1e-10, "r2 matches brute-force recomputation");
  expect_le(std::abs(brute_mse - rep_mse), 1e-10 * std::max(1.0, rep_mse),
            "mse matches brute-force recomputation");
  expect_le(std::abs(rep_rmse - std::sqrt(rep_mse)), 1e-12, "reported rmse = sqrt(mse)");

  double dt = timer.seconds();
  std::cout << "  runtime " << dt << " s\n";
  expect_le(dt, 3600.0, "runtime budget");
  return g_failures == 0;
}

// ----------------------------------------------------------------- clustering

double brute_silhouette(const std::vector<Vec>& data, const std::vector<int>& assign) {
  int k = 0;
  for (int a : assign) k = std::max(k, a + 1);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int a : assign) ++sizes[static_cast<std::size_t>(a)];
  auto dist = [](const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  };
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::size_t ci = static_cast<std::size_t>(assign[i]);
    if (sizes[ci] == 1) continue;
    Vec sums(static_cast<std::size_t>(k), 0.0);
    for (std::size_t j = 0; j < data.size(); ++j)
      if (j != i) sums[static_cast<std::size_t>(assign[j])] += dist(data[i], data[j]);
    double a = sums[ci] / static_cast<double>(sizes[ci] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c)
      if (c != ci && sizes[c] > 0) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(data.size());
}

double brute_davies_bouldin(const std::vector<Vec>& data, const cluster::ClusterResult& r) {
  std::size_t k = r.centroids.rows(), dim = r.centroids.cols();
  Vec scatter(k, 0.0);
  std::vector<std::size_t> sizes(k, 0);
  auto cdist = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      double v = r.centroids(a, d) - r.centroids(b, d);
      s += v * v;
    }
    return std::sqrt(s);
  };
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::size_t c = static_cast<std::size_t>(r.assignments[i]);
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      double v = data[i][d] - r.centroids(c, d);
      s += v * v;
    }
    scatter[c] += std::sqrt(s);
    ++sizes[c];
  }
  for (std::size_t c = 0; c < k; ++c) scatter[c] /= static_cast<double>(sizes[c]);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      if (i != j) worst = std::max(worst, (scatter[i] + scatter[j]) / cdist(i, j));
    total += worst;
  }
  return total / static_cast<double>(k);
}

bool crit_clustering(const Args&) {
  Timer timer;
  Rng rng(606);

  // three 200-point datasets of different shapes
  std::vector<std::vector<Vec>> datasets;
  {
    std::vector<Vec> blobs;  // 4 gaussian blobs in 2-d
    const double c[4][2] = {{0, 0}, {6, 0}, {0, 6}, {6, 6}};
    for (int i = 0; i < 200; ++i) {
      int b = i % 4;
      blobs.push_back(Vec{c[b][0] + 0.8 * rng.normal(), c[b][1] + 0.8 * rng.normal()});
    }
    datasets.push_back(blobs);

    std::vector<Vec> uniform;  // structureless 5-d noise
    for (int i = 0; i < 200; ++i) {
      Vec x(5);
      for (double& v : x) v = rng.uniform(-1.0, 1.0);
      uniform.push_back(x);
    }
    datasets.push_back(uniform);

    std::vector<Vec> stretched;  // anisotropic 3-d pair
    for (int i = 0; i < 200; ++i) {
      double off = (i % 2) ? 5.0 : -5.0;
      stretched.push_back(Vec{off + rng.normal() * 2.0, rng.normal() * 0.3, rng.normal()});
    }
    datasets.push_back(stretched);
  }

  double worst_sil = 0.0, worst_db = 0.0;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (int k = 2; k <= 5; ++k) {
      cluster::ClusterResult r = cluster::kmeans(datasets[d], k, 1000 + k);
      worst_sil = std::max(worst_sil, std::abs(cluster::silhouette(datasets[d], r.assignments) -
                                               brute_silhouette(datasets[d], r.assignments)));
      worst_db = std::max(worst_db, std::abs(cluster::davies_bouldin(datasets[d], r) -
                                             brute_davies_bouldin(datasets[d], r)));
    }
  }
  std::cout << "  3 datasets x k in 2..5: worst silhouette deviation " << worst_sil
            << ", worst davies-bouldin deviation " << worst_db << "\n";
  expect_le(worst_sil, 1e-10, "silhouette vs brute force");
  expect_le(worst_db, 1e-10, "davies-bouldin vs brute force");

  // constructed 3-regime data: the DB curve bottoms out at k=3
  std::vector<Vec> regimes;
  const double centers[3][2] = {{0.0, 0.0}, {8.0, 0.0}, {4.0, 7.0}};
  for (int i = 0; i < 210; ++i) {
    int b = i % 3;
    regimes.push_back(
        Vec{centers[b][0] + 0.3 * rng.normal(), centers[b][1] + 0.3 * rng.normal()});
  }
  int best_k = -1;
  double best_db = std::numeric_limits<double>::infinity();
  for (int k = 2; k <= 8; ++k) {
    cluster::ClusterResult r = cluster::kmeans(regimes, k, 55);
    double db = cluster::davies_bouldin(regimes, r);
    std::cout << "  k=" << k << " davies-bouldin " << db << "\n";
    if (db < best_db) {
      best_db = db;
      best_k = k;
    }
  }
  expect(best_k == 3, "davies-bouldin minimum at k=3");

  double dt = timer.seconds();
  std::cout << "  runtime " << dt << " s\n";
  expect_le(dt, 60.0, "runtime budget");
  return g_failures == 0;
}

// ---------------------------------------------------------------- determinism

std::string determinism_config_json(const fs::path& out_dir) {
  std::ostringstream os;
  os << "{\n"
     << "  \"seed\": 7,\n"
     << "  \"out_dir\": \"" << out_dir.string() << "\",\n"
     << "  \"threads\": 0,\n"
     << "  \"data\": {\"samples\": 240},\n"
     << "  \"quantum\": {\"qubits\": 4, \"layers\": 1},\n"
     << "  \"model\": {\"variants\": [\"BaselineMLP\", \"ClassicalQuantum\"], "
        "\"hidden\": [16, 8]},\n"
     << "  \"train\": {\"max_epochs\": 8, \"patience\": 8}\n"
     << "}\n";
  return os.str();
}

bool crit_determinism(const Args& args) {
  Timer timer;
  if (args.cli.empty()) {
    std::cout << "  missing --cli\n";
    ++g_failures;
    return false;
  }
  fs::path dir = fresh_dir(args, "determinism");
  fs::path out = dir / "out";
  fs::path cfg_path = dir / "config.json";
  write_file(cfg_path, determinism_config_json(out));

  auto one_round = [&]() {
    fs::remove_all(out);
    run_cli_checked(args, "gen-data --config " + cfg_path.string() + " --binary");
    run_cli_checked(args, "train --config " + cfg_path.string() + " --variant BaselineMLP");
    run_cli_checked(args, "compare --config " + cfg_path.string());
    // wall-clock reports are the one legitimately run-dependent output
    std::map<std::string, std::uint64_t> hashes;
    for (const auto& entry : fs::directory_iterator(out)) {
      std::string name = entry.path().filename().string();
      if (name.find("timing") != std::string::npos) continue;
      hashes[name] = fnv1a_file(entry.path());
    }
    return hashes;
  };

  auto first = one_round();
  auto second = one_round();

  expect(first.size() >= 8, "run produced a full artifact set");
  expect(first.count("dataset.csv") == 1, "dataset.csv present");
  expect(first.count("checkpoint_BaselineMLP.json") == 1, "checkpoint present");
  expect(first.count("compare_metrics.csv") == 1, "compare metrics present");

  expect(first.size() == second.size(), "same artifact set across reruns");
  for (const auto& [name, hash] : first) {
    auto it = second.find(name);
    if (it == second.end()) {
      ++g_failures;
      std::cout << "  missing on rerun: " << name << "\n";
    } else if (it->second != hash) {
      ++g_failures;
      std::cout << "  checksum mismatch: " << name << "\n";
    }
  }
  std::cout << "  " << first.size() << " artifacts checksummed across two identical runs\n";

  double dt = timer.seconds();
  std::cout << "  runtime " << dt << " s\n";
  return g_failures == 0;
}

}  // namespace

int main(int argc, char** argv) {
  Args args;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) args.cli = argv[++i];
    else if (a == "--work-dir" && i + 1 < argc) args.work_dir = argv[++i];
    else if (args.criterion.empty()) args.criterion = a;
    else {
      std::cerr << "unexpected argument: " << a << "\n";
      return 2;
    }
  }
  if (args.criterion.empty()) {
    std::cerr << "usage: acceptance <criterion> [--cli PATH] [--work-dir PATH]\n";
    return 2;
  }
  fs::create_directories(args.work_dir);

  using CriterionFn = bool (*)(const Args&);
  const std::map<std::string, CriterionFn> criteria{
      {"embedding-invariants", crit_embedding_invariants},
      {"matrix-sqrt-oracle", crit_matrix_sqrt},
      {"quantum-gradients", crit_quantum_gradients},
      {"end-to-end-gradients", crit_end_to_end},
      {"fe-oracle", crit_fe_oracle},
      {"complexity-figures", crit_complexity},
      {"desk-scale-learning", crit_desk_scale},
      {"clustering-oracle", crit_clustering},
      {"determinism", crit_determinism},
  };
  auto it = criteria.find(args.criterion);
  if (it == criteria.end()) {
    std::cerr << "unknown criterion: " << args.criterion << "\n";
    return 2;
  }

  bool ok = false;
  try {
    ok = it->second(args);
  } catch (const std::exception& e) {
    std::cout << "  unhandled error: " << e.what() << "\n";
    ok = false;
  }
  std::cout << (ok ? "PASS " : "FAIL ") << args.criterion << "\n";
  return ok ? 0 : 1;
}
