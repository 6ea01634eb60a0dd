#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qfem/linalg.hpp"
#include "qfem/rng.hpp"

namespace qfem::nn {

enum class Activation { ReLU, Identity };

struct DenseLayer {
  Matrix weights;  // out x in
  Vec bias;
  Activation act = Activation::ReLU;

  std::size_t in_dim() const { return weights.cols(); }
  std::size_t out_dim() const { return weights.rows(); }
};

// He-uniform weights (limit sqrt(6/fan_in)), zero bias.
DenseLayer make_dense(std::size_t in, std::size_t out, Activation act, Rng& rng);

// y = act(W x + b); optionally stores the pre-activation for backprop.
Vec dense_forward(const DenseLayer& layer, const Vec& in, Vec* pre_act = nullptr);

// Mean over samples of the squared Euclidean distance.
double mse_loss(const std::vector<Vec>& predictions, const std::vector<Vec>& targets);

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double l2 = 1e-5;  // applied to dense weights only, as gradient term 2*l2*w
  int batch_size = 32;
  int max_epochs = 200;
  int patience = 20;
  double min_delta = 1e-7;
  double validation_fraction = 0.2;
  double test_fraction = 0.2;  // held out before the train/val split
  std::uint64_t seed = 42;
  int threads = 0;  // 0 = process default
  int shots = 0;    // 0 = exact expectation values
};

struct AdamState {
  Vec m;
  Vec v;
  long step = 0;
};

// Textbook Adam with bias correction; grads must already contain any
// regularization terms.
void adam_step(Vec& params, const Vec& grads, AdamState& state, const TrainConfig& cfg);

// Pooled per-entry metrics: mse averages squared error over every
// (sample, dimension) entry so rmse; nrmse and r2 share one scale.
struct MetricsReport {
  double mse = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
  double nrmse_range = 0.0;  // rmse / (max - min) of pooled targets
  double nrmse_std = 0.0;    // rmse / std of pooled targets
};

MetricsReport compute_metrics(const std::vector<Vec>& predictions,
                              const std::vector<Vec>& targets);

std::string metrics_to_string(const MetricsReport& m);

}  // namespace qfem::nn
