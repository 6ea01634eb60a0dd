#include "qfem/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "qfem/errors.hpp"
#include "qfem/numeric_io.hpp"
#include "qfem/rng.hpp"

namespace qfem {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

nn::VariantSpec make_variant_spec(const ExperimentConfig& cfg, nn::Variant v,
                                  int sensor_dim, int output_dim) {
  nn::VariantSpec sp;
  sp.variant = v;
  sp.sensor_dim = sensor_dim;
  sp.output_dim = output_dim;
  sp.hidden = cfg.hidden;
  sp.cluster_k = cfg.cluster_k;
  sp.cluster_placement = cfg.cluster_placement;
  sp.poly = cfg.poly;
  sp.epsilon = cfg.epsilon;
  sp.qubits = cfg.qubits;
  sp.layers = cfg.circuit_layers;
  sp.axes = cfg.axes;
  sp.topology = cfg.topology;
  return sp;
}

nn::TrainConfig make_train_config(const ExperimentConfig& cfg) {
  nn::TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  tc.threads = cfg.threads;
  return tc;
}

VariantRun train_variant(const ExperimentConfig& cfg, nn::Variant v,
                         const fem::Dataset& ds, nn::HybridModel& model_out) {
  if (ds.sensors.empty()) throw DataError("train_variant: empty dataset");
  const int sensor_dim = static_cast<int>(ds.sensors.front().size());
  const int output_dim = static_cast<int>(ds.displacements.front().size());

  nn::VariantSpec sp = make_variant_spec(cfg, v, sensor_dim, output_dim);
  Rng init_rng(derive_seed(cfg.seed, std::string("init:") + nn::variant_name(v)));
  model_out = nn::build_variant(sp, init_rng);

  VariantRun run;
  run.variant = v;
  run.param_count = model_out.param_count();

  const double t0 = now_seconds();
  run.train = nn::train(model_out, ds.sensors, ds.displacements,
                        make_train_config(cfg));
  run.train_seconds = now_seconds() - t0;

  run.test_metrics = nn::evaluate(model_out, ds.sensors, ds.displacements,
                                  run.train.split.test, cfg.threads);

  // Raw-unit rmse plus a per-sample latency estimate over the same rows.
  const double t1 = now_seconds();
  double se = 0.0;
  std::size_t count = 0;
  for (std::size_t idx : run.train.split.test) {
    Vec pred = model_out.predict(ds.sensors[idx]);
    const Vec& truth = ds.displacements[idx];
    for (std::size_t j = 0; j < pred.size(); ++j) {
      const double d = pred[j] - truth[j];
      se += d * d;
    }
    count += pred.size();
  }
  const double t2 = now_seconds();
  if (count == 0) throw DataError("train_variant: empty test split");
  run.raw_rmse = std::sqrt(se / static_cast<double>(count));
  run.infer_ms_per_sample =
      1e3 * (t2 - t1) / static_cast<double>(run.train.split.test.size());
  return run;
}

ComparisonTable run_compare(const ExperimentConfig& cfg, const fem::Dataset& ds) {
  ComparisonTable table;
  for (nn::Variant v : cfg.variants) {
    nn::HybridModel model;
    table.rows.push_back(train_variant(cfg, v, ds, model));
  }
  return table;
}

std::string comparison_metrics_csv(const ComparisonTable& t) {
  std::ostringstream out;
  out << "variant,params,epochs,best_val_loss,test_mse,test_rmse,test_r2,"
         "test_nrmse_range,test_nrmse_std,raw_rmse\n";
  for (const VariantRun& r : t.rows) {
    out << nn::variant_name(r.variant) << ',' << r.param_count << ','
        << r.train.epochs_run << ',' << format_double(r.train.best_val_loss)
        << ',' << format_double(r.test_metrics.mse) << ','
        << format_double(r.test_metrics.rmse) << ','
        << format_double(r.test_metrics.r2) << ','
        << format_double(r.test_metrics.nrmse_range) << ','
        << format_double(r.test_metrics.nrmse_std) << ','
        << format_double(r.raw_rmse) << '\n';
  }
  return out.str();
}

std::string comparison_timing_csv(const ComparisonTable& t) {
  std::ostringstream out;
  out << "variant,train_seconds,infer_ms_per_sample\n";
  for (const VariantRun& r : t.rows) {
    out << nn::variant_name(r.variant) << ',' << format_double(r.train_seconds)
        << ',' << format_double(r.infer_ms_per_sample) << '\n';
  }
  return out.str();
}

std::string comparison_pretty(const ComparisonTable& t) {
  std::ostringstream out;
  out << "Model                     MSE         RMSE        R2      "
         "NRMSE(range)  NRMSE(std)\n";
  for (const VariantRun& r : t.rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-24s %-11.3e %-11.3e %-7.4f %-13.5f %-10.5f\n",
                  nn::variant_name(r.variant), r.test_metrics.mse,
                  r.test_metrics.rmse, r.test_metrics.r2,
                  r.test_metrics.nrmse_range, r.test_metrics.nrmse_std);
    out << buf;
  }
  return out.str();
}

std::string history_csv(const nn::TrainResult& r) {
  std::ostringstream out;
  out << "epoch,train_loss,val_loss\n";
  for (const nn::EpochStats& e : r.history)
    out << e.epoch << ',' << format_double(e.train_loss) << ','
        << format_double(e.val_loss) << '\n';
  return out.str();
}

std::string metrics_json(const VariantRun& run) {
  nlohmann::json j;
  j["variant"] = nn::variant_name(run.variant);
  j["params"] = run.param_count;
  j["epochs_run"] = run.train.epochs_run;
  j["best_epoch"] = run.train.best_epoch;
  j["best_val_loss"] = run.train.best_val_loss;
  j["test"]["mse"] = run.test_metrics.mse;
  j["test"]["rmse"] = run.test_metrics.rmse;
  j["test"]["r2"] = run.test_metrics.r2;
  j["test"]["nrmse_range"] = run.test_metrics.nrmse_range;
  j["test"]["nrmse_std"] = run.test_metrics.nrmse_std;
  j["raw_rmse"] = run.raw_rmse;
  return j.dump(2) + "\n";
}

std::string timing_json(const VariantRun& run) {
  nlohmann::json j;
  j["variant"] = nn::variant_name(run.variant);
  j["train_seconds"] = run.train_seconds;
  j["infer_ms_per_sample"] = run.infer_ms_per_sample;
  return j.dump(2) + "\n";
}

ComplexityReport complexity_report(const ComplexityDims& d) {
  if (d.d_in < 1 || d.h1 < 1 || d.h2 < 1 || d.d_out < 1 || d.d_expanded < 1 ||
      d.layers < 1 || d.qubits < 1 || d.h3 < 1)
    throw ConfigError("complexity_report: all dimensions must be positive");
  ComplexityReport r;
  r.dims = d;
  const double de = d.d_expanded;
  r.classical_macs = double(d.d_in) * d.h1 + double(d.h1) * d.h2 +
                     double(d.h2) * d.d_out;
  r.hybrid_macs = de * de * de + double(d.layers) * d.qubits +
                  double(d.qubits) * d.h3 + double(d.h3) * d.d_out;
  r.ratio = r.hybrid_macs / r.classical_macs;
  return r;
}

std::string complexity_pretty(const ComplexityReport& r) {
  const ComplexityDims& d = r.dims;
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "classical MLP  (%d-%d-%d-%d):\n"
                "  macs = %d*%d + %d*%d + %d*%d = %.0f\n",
                d.d_in, d.h1, d.h2, d.d_out, d.d_in, d.h1, d.h1, d.h2, d.h2,
                d.d_out, r.classical_macs);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "hybrid pipeline (embed %d -> %d qubits x %d layers -> %d -> %d):\n"
                "  macs = %d^3 + %d*%d + %d*%d + %d*%d = %.0f\n",
                d.d_expanded, d.qubits, d.layers, d.h3, d.d_out, d.d_expanded,
                d.layers, d.qubits, d.qubits, d.h3, d.h3, d.d_out,
                r.hybrid_macs);
  out << buf;
  std::snprintf(buf, sizeof buf, "overhead ratio: %.4f\n", r.ratio);
  out << buf;
  return out.str();
}

}  // namespace qfem
