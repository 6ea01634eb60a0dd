// Microbenchmarks for the numeric kernels on the hot paths: feature
// embedding, eigensolve, circuit simulation, gradient evaluation, FE
// assembly/solve, clustering, and end-to-end single-sample inference.

#include <benchmark/benchmark.h>

#include "qfem/clustering.hpp"
#include "qfem/embed.hpp"
#include "qfem/femgen.hpp"
#include "qfem/model.hpp"
#include "qfem/qsim.hpp"
#include "qfem/rng.hpp"

using namespace qfem;

namespace {

Vec random_sensors(Rng& rng) {
  Vec x(7);
  for (double& v : x) v = rng.normal();
  return x;
}

// degree-2 monomials of a 7-dim reading, the 28-dim production config
embed::PolyConfig production_poly() {
  embed::PolyConfig pc;
  pc.degree = 2;
  pc.terms = embed::TermMode::kExactDegreeOnly;
  pc.include_bias = false;
  return pc;
}

void bm_embed_density(benchmark::State& state) {
  Rng rng(1);
  Vec x = random_sensors(rng);
  embed::PolyConfig pc = production_poly();
  for (auto _ : state) {
    embed::EmbeddedState st = embed::embed(x, pc, 1e-6);
    benchmark::DoNotOptimize(st.amplitudes.data());
  }
}
BENCHMARK(bm_embed_density);

void bm_jacobi_eigen_28(benchmark::State& state) {
  Rng rng(2);
  Matrix a(28, 28);
  for (std::size_t i = 0; i < 28; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.normal();
  for (auto _ : state) {
    EigenDecomposition d = jacobi_eigen(a);
    benchmark::DoNotOptimize(d.eigenvalues.data());
  }
}
BENCHMARK(bm_jacobi_eigen_28);

void bm_circuit_forward_n10_l10(benchmark::State& state) {
  Rng rng(3);
  qsim::CircuitParams params =
      qsim::random_circuit(10, 10, {qsim::Axis::Y}, qsim::Topology::Ring, rng);
  qsim::StateVector input = qsim::init_zero(10);
  for (auto _ : state) {
    qsim::StateVector out = qsim::run_circuit(input, params);
    benchmark::DoNotOptimize(out.amplitudes.data());
  }
}
BENCHMARK(bm_circuit_forward_n10_l10);

void bm_param_shift_n6_l2(benchmark::State& state) {
  Rng rng(4);
  qsim::CircuitParams params =
      qsim::random_circuit(6, 2, {qsim::Axis::Y}, qsim::Topology::Ring, rng);
  qsim::ObservableSet obs = qsim::ObservableSet::all_z(6);
  qsim::StateVector input = qsim::init_zero(6);
  Vec angles(6);
  for (double& v : angles) v = rng.uniform(-3.0, 3.0);
  qsim::angle_embed(input, angles);
  Vec downstream(6);
  for (double& v : downstream) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    Vec g = qsim::param_shift_grad(input, params, obs, downstream);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(bm_param_shift_n6_l2);

void bm_frame_factorize(benchmark::State& state) {
  fem::FrameModel frame = fem::build_frame(fem::FrameConfig{});
  for (auto _ : state) {
    fem::StaticSolver solver(frame);
    benchmark::DoNotOptimize(&solver);
  }
}
BENCHMARK(bm_frame_factorize);

void bm_frame_solve(benchmark::State& state) {
  fem::FrameModel frame = fem::build_frame(fem::FrameConfig{});
  fem::StaticSolver solver(frame);
  Rng rng(5);
  Vec f(static_cast<std::size_t>(frame.dof_count()));
  for (double& v : f) v = rng.normal();
  for (auto _ : state) {
    Vec u = solver.solve(f);
    benchmark::DoNotOptimize(u.data());
  }
}
BENCHMARK(bm_frame_solve);

void bm_kmeans_1000x7_k7(benchmark::State& state) {
  Rng rng(6);
  std::vector<Vec> data;
  data.reserve(1000);
  for (int i = 0; i < 1000; ++i) data.push_back(random_sensors(rng));
  for (auto _ : state) {
    cluster::ClusterResult r = cluster::kmeans(data, 7, 99, 3);
    benchmark::DoNotOptimize(r.assignments.data());
  }
}
BENCHMARK(bm_kmeans_1000x7_k7);

nn::HybridModel full_scale(nn::Variant v, Rng& rng) {
  nn::VariantSpec sp;
  sp.variant = v;
  sp.sensor_dim = 7;
  sp.output_dim = 132;
  sp.hidden = {64, 32};
  sp.cluster_k = 7;
  sp.layers = 10;
  sp.poly = production_poly();
  return nn::build_variant(sp, rng);
}

void bm_infer_baseline_mlp(benchmark::State& state) {
  Rng rng(7);
  nn::HybridModel m = full_scale(nn::Variant::BaselineMLP, rng);
  Vec x = random_sensors(rng);
  for (auto _ : state) {
    Vec y = m.predict(x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(bm_infer_baseline_mlp);

void bm_infer_hybrid_density(benchmark::State& state) {
  Rng rng(8);
  nn::HybridModel m = full_scale(nn::Variant::PolySPD_HC_Clustered, rng);
  Vec x = random_sensors(rng);
  for (auto _ : state) {
    Vec y = m.predict(x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(bm_infer_hybrid_density);

}  // namespace

BENCHMARK_MAIN();
