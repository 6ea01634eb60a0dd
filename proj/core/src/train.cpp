#include "qfem/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qfem/parallel.hpp"

namespace qfem::nn {

namespace {

void check_train_config(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0)) throw ConfigError("beta1 must be in [0, 1)");
  if (!(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) throw ConfigError("beta2 must be in [0, 1)");
  if (!(cfg.adam_epsilon > 0.0)) throw ConfigError("adam_epsilon must be positive");
  if (cfg.l2 < 0.0) throw ConfigError("l2 must be non-negative");
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (cfg.max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  if (cfg.patience < 0) throw ConfigError("patience must be non-negative");
  if (cfg.min_delta < 0.0) throw ConfigError("min_delta must be non-negative");
  if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction <= 0.5))
    throw ConfigError("validation_fraction must be in (0, 0.5]");
  if (!(cfg.test_fraction >= 0.0 && cfg.test_fraction <= 0.5))
    throw ConfigError("test_fraction must be in [0, 0.5]");
}

}  // namespace

SplitIndices split_dataset(std::size_t n, double test_fraction, double val_fraction,
                           std::uint64_t seed) {
  if (n < 3) throw DataError("split_dataset: need at least 3 samples");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  std::size_t n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  std::size_t n_val =
      static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(n - n_test)));
  if (n_val == 0) n_val = 1;
  if (n_test + n_val >= n) throw DataError("split_dataset: no training samples left");

  SplitIndices s;
  s.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test),
               order.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test + n_val), order.end());
  return s;
}

namespace {

std::vector<Vec> gather(const std::vector<Vec>& rows, const std::vector<std::size_t>& idx) {
  std::vector<Vec> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(rows[i]);
  return out;
}

double mean_sample_loss(const HybridModel& model, const std::vector<Vec>& prepared,
                        const std::vector<Vec>& std_targets,
                        const std::vector<std::size_t>& idx, int threads) {
  Vec losses(idx.size(), 0.0);
  parallel_for(
      idx.size(),
      [&](std::size_t k) {
        Vec pred = model.forward_prepared(prepared[idx[k]]);
        const Vec& t = std_targets[idx[k]];
        double s = 0.0;
        for (std::size_t j = 0; j < pred.size(); ++j) {
          double d = pred[j] - t[j];
          s += d * d;
        }
        losses[k] = s;
      },
      threads);
  double total = 0.0;
  for (double v : losses) total += v;
  return total / static_cast<double>(idx.size());
}

}  // namespace

TrainResult train(HybridModel& model, const std::vector<Vec>& sensors,
                  const std::vector<Vec>& targets, const TrainConfig& cfg) {
  check_train_config(cfg);
  if (sensors.size() != targets.size() || sensors.empty())
    throw DataError("train: sensor/target row mismatch");

  TrainResult result;
  result.split = split_dataset(sensors.size(), cfg.test_fraction, cfg.validation_fraction,
                               derive_seed(cfg.seed, "split"));
  const auto& tr = result.split.train;
  const auto& va = result.split.val;

  model.input_std = Standardizer::fit(gather(sensors, tr));
  model.target_std = Standardizer::fit(gather(targets, tr));

  // Fixed per-sample work (standardization, density embedding) happens
  // once, not per epoch.
  std::size_t n = sensors.size();
  std::vector<Vec> prepared(n), std_targets(n);
  std::vector<std::size_t> used;
  used.insert(used.end(), tr.begin(), tr.end());
  used.insert(used.end(), va.begin(), va.end());
  parallel_for(
      used.size(),
      [&](std::size_t k) {
        std::size_t i = used[k];
        prepared[i] = model.prepare_input(sensors[i]);
        std_targets[i] = model.target_std.transform(targets[i]);
      },
      cfg.threads);

  Vec params = model.get_params();
  AdamState adam;
  Rng batch_rng(derive_seed(cfg.seed, "batch"));

  // L2 applies to dense weights only.
  auto segs = model.segments();

  Vec best_params = params;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = -1;
  int since_best = 0;

  std::vector<std::size_t> order(tr);
  std::size_t max_batch = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size),
                                                order.size());
  std::vector<Workspace> ws(max_batch);
  bool per_sample_slots = model.quantum.has_value();
  std::vector<Vec> grad_slots;
  if (per_sample_slots) grad_slots.assign(max_batch, Vec(params.size(), 0.0));
  Vec grad(params.size(), 0.0);
  Vec batch_losses(max_batch, 0.0);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    batch_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;

    for (std::size_t lo = 0; lo < order.size(); lo += max_batch) {
      std::size_t hi = std::min(lo + max_batch, order.size());
      std::size_t b = hi - lo;
      double inv_b = 1.0 / static_cast<double>(b);

      std::fill(grad.begin(), grad.end(), 0.0);
      parallel_for(
          b,
          [&](std::size_t k) {
            std::size_t i = order[lo + k];
            Vec pred = model.forward_prepared(prepared[i], &ws[k]);
            const Vec& t = std_targets[i];
            double loss = 0.0;
            Vec dpred(pred.size());
            for (std::size_t j = 0; j < pred.size(); ++j) {
              double d = pred[j] - t[j];
              loss += d * d;
              dpred[j] = 2.0 * d * inv_b;
            }
            batch_losses[k] = loss;
            if (per_sample_slots) {
              std::fill(grad_slots[k].begin(), grad_slots[k].end(), 0.0);
              model.backward_prepared(ws[k], dpred, grad_slots[k]);
            } else {
              ws[k].output = std::move(dpred);  // stash for the serial pass
            }
          },
          cfg.threads);

      if (per_sample_slots) {
        for (std::size_t k = 0; k < b; ++k)
          for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += grad_slots[k][p];
      } else {
        for (std::size_t k = 0; k < b; ++k) model.backward_prepared(ws[k], ws[k].output, grad);
      }
      for (const ParamSegment& seg : segs) {
        if (seg.kind != ParamSegment::Kind::Weight || cfg.l2 == 0.0) continue;
        for (std::size_t p = seg.offset; p < seg.offset + seg.size; ++p)
          grad[p] += 2.0 * cfg.l2 * params[p];
      }

      double batch_loss = 0.0;
      for (std::size_t k = 0; k < b; ++k) batch_loss += batch_losses[k];
      epoch_loss += batch_loss * inv_b;
      ++batches;

      adam_step(params, grad, adam, cfg);
      model.set_params(params);
    }

    double train_loss = epoch_loss / static_cast<double>(batches);
    double val_loss = mean_sample_loss(model, prepared, std_targets, va, cfg.threads);
    result.history.push_back({epoch, train_loss, val_loss});

    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
      std::ostringstream msg;
      msg << "training diverged at epoch " << epoch << " (train_loss=" << train_loss
          << ", val_loss=" << val_loss << ")";
      throw NumericalError(msg.str());
    }

    if (val_loss < best_val - cfg.min_delta) {
      best_val = val_loss;
      best_epoch = epoch;
      best_params = params;
      since_best = 0;
    } else {
      ++since_best;
      if (cfg.patience > 0 && since_best >= cfg.patience) break;
    }
  }

  if (best_epoch >= 0) {
    model.set_params(best_params);
    result.best_val_loss = best_val;
  } else {
    result.best_val_loss = result.history.empty() ? 0.0 : result.history.back().val_loss;
  }
  result.best_epoch = best_epoch;
  result.epochs_run = static_cast<int>(result.history.size());
  return result;
}

std::vector<Vec> predict_standardized_batch(const HybridModel& model,
                                            const std::vector<Vec>& sensors,
                                            const std::vector<std::size_t>& indices,
                                            int threads) {
  std::vector<Vec> preds(indices.size());
  parallel_for(
      indices.size(),
      [&](std::size_t k) { preds[k] = model.predict_standardized(sensors[indices[k]]); },
      threads);
  return preds;
}

MetricsReport evaluate(const HybridModel& model, const std::vector<Vec>& sensors,
                       const std::vector<Vec>& targets, const std::vector<std::size_t>& indices,
                       int threads) {
  if (indices.empty()) throw DataError("evaluate: empty index set");
  std::vector<Vec> preds = predict_standardized_batch(model, sensors, indices, threads);
  std::vector<Vec> t(indices.size());
  parallel_for(
      indices.size(),
      [&](std::size_t k) { t[k] = model.target_std.transform(targets[indices[k]]); },
      threads);
  return compute_metrics(preds, t);
}

MetricsReport evaluate_all(const HybridModel& model, const std::vector<Vec>& sensors,
                           const std::vector<Vec>& targets, int threads) {
  std::vector<std::size_t> idx(sensors.size());
  std::iota(idx.begin(), idx.end(), 0);
  return evaluate(model, sensors, targets, idx, threads);
}

double total_loss(const HybridModel& model, const std::vector<Vec>& sensors,
                  const std::vector<Vec>& targets, const std::vector<std::size_t>& indices,
                  double l2) {
  if (indices.empty()) throw DataError("total_loss: empty index set");
  double total = 0.0;
  for (std::size_t i : indices) {
    Vec pred = model.forward_prepared(model.prepare_input(sensors[i]));
    Vec t = model.target_std.transform(targets[i]);
    for (std::size_t j = 0; j < pred.size(); ++j) {
      double d = pred[j] - t[j];
      total += d * d;
    }
  }
  total /= static_cast<double>(indices.size());
  if (l2 > 0.0) {
    for (const DenseLayer& l : model.pre)
      for (std::size_t i = 0; i < l.out_dim() * l.in_dim(); ++i)
        total += l2 * l.weights.data()[i] * l.weights.data()[i];
    for (const DenseLayer& l : model.post)
      for (std::size_t i = 0; i < l.out_dim() * l.in_dim(); ++i)
        total += l2 * l.weights.data()[i] * l.weights.data()[i];
  }
  return total;
}

}  // namespace qfem::nn
