#pragma once

#include "qfem/model.hpp"

namespace qfem::nn {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

// Seeded shuffle, then test / validation / train in that order.
SplitIndices split_dataset(std::size_t n, double test_fraction, double val_fraction,
                           std::uint64_t seed);

struct EpochStats {
  int epoch;
  double train_loss;  // mean of minibatch losses, without the L2 term
  double val_loss;
};

struct TrainResult {
  std::vector<EpochStats> history;
  double best_val_loss = 0.0;
  int best_epoch = -1;
  int epochs_run = 0;
  SplitIndices split;
};

// Minibatch Adam on mse_loss + l2 * sum(dense weights^2). Standardizers
// are fitted on the train split only; fixed embeddings are precomputed
// once per sample. Early stopping restores the best-validation
// parameters. Identical seed and config give a bit-identical trajectory
// for any thread count (per-sample gradients are reduced in sample
// order). Throws NumericalError if the loss goes non-finite.
TrainResult train(HybridModel& model, const std::vector<Vec>& sensors,
                  const std::vector<Vec>& targets, const TrainConfig& cfg);

std::vector<Vec> predict_standardized_batch(const HybridModel& model,
                                            const std::vector<Vec>& sensors,
                                            const std::vector<std::size_t>& indices,
                                            int threads = 0);

// Metrics in standardized target space over the given rows.
MetricsReport evaluate(const HybridModel& model, const std::vector<Vec>& sensors,
                       const std::vector<Vec>& targets, const std::vector<std::size_t>& indices,
                       int threads = 0);

MetricsReport evaluate_all(const HybridModel& model, const std::vector<Vec>& sensors,
                           const std::vector<Vec>& targets, int threads = 0);

// Total training loss (mse + L2) at the current parameters over the
// given rows; the quantity backward_prepared differentiates.
double total_loss(const HybridModel& model, const std::vector<Vec>& sensors,
                  const std::vector<Vec>& targets, const std::vector<std::size_t>& indices,
                  double l2);

}  // namespace qfem::nn
