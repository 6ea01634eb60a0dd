#pragma once

#include <string>
#include <vector>

#include "qfem/config.hpp"
#include "qfem/train.hpp"

namespace qfem {

nn::VariantSpec make_variant_spec(const ExperimentConfig& cfg, nn::Variant v,
                                  int sensor_dim, int output_dim);
nn::TrainConfig make_train_config(const ExperimentConfig& cfg);

struct VariantRun {
  nn::Variant variant = nn::Variant::BaselineMLP;
  std::size_t param_count = 0;
  nn::TrainResult train;
  nn::MetricsReport test_metrics;  // standardized target space
  double raw_rmse = 0.0;           // original output units
  double train_seconds = 0.0;
  double infer_ms_per_sample = 0.0;  // mean over the test rows
};

// Trains one variant on the dataset using the config's seed, splits and
// hyperparameters. The model is left at its best-validation weights.
VariantRun train_variant(const ExperimentConfig& cfg, nn::Variant v,
                         const fem::Dataset& ds, nn::HybridModel& model_out);

struct ComparisonTable {
  std::vector<VariantRun> rows;
};

// Same dataset, seed and splits for every requested variant.
ComparisonTable run_compare(const ExperimentConfig& cfg, const fem::Dataset& ds);

// Deterministic content only (no wall-clock columns).
std::string comparison_metrics_csv(const ComparisonTable& t);
// Wall-clock timings, kept in a separate file so the metrics CSV is
// byte-reproducible across runs.
std::string comparison_timing_csv(const ComparisonTable& t);
std::string comparison_pretty(const ComparisonTable& t);

std::string history_csv(const nn::TrainResult& r);
// Deterministic for a fixed seed; wall-clock figures live in
// timing_json so reruns of one seed produce identical metric files.
std::string metrics_json(const VariantRun& run);
std::string timing_json(const VariantRun& run);

// Multiply-accumulate counts for one inference pass, from the model
// dimensions. The hybrid estimate charges the density-matrix pipeline
// at cubic cost and one unit per circuit angle.
struct ComplexityDims {
  int d_in = 7;
  int h1 = 64;
  int h2 = 32;
  int d_out = 1017;
  int d_expanded = 28;
  int layers = 10;
  int qubits = 10;
  int h3 = 64;
};

struct ComplexityReport {
  ComplexityDims dims;
  double classical_macs = 0.0;
  double hybrid_macs = 0.0;
  double ratio = 0.0;
};

ComplexityReport complexity_report(const ComplexityDims& dims);
std::string complexity_pretty(const ComplexityReport& r);

}  // namespace qfem
