#include "qfem/nn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qfem::nn {

DenseLayer make_dense(std::size_t in, std::size_t out, Activation act, Rng& rng) {
  if (in == 0 || out == 0) throw ConfigError("dense layer dimensions must be positive");
  DenseLayer layer;
  layer.weights = Matrix(out, in);
  layer.bias.assign(out, 0.0);
  layer.act = act;
  double limit = std::sqrt(6.0 / static_cast<double>(in));
  for (std::size_t i = 0; i < out; ++i)
    for (std::size_t j = 0; j < in; ++j) layer.weights(i, j) = rng.uniform(-limit, limit);
  return layer;
}

Vec dense_forward(const DenseLayer& layer, const Vec& in, Vec* pre_act) {
  if (in.size() != layer.in_dim()) throw DataError("dense_forward: input dimension mismatch");
  Vec z(layer.out_dim());
  for (std::size_t i = 0; i < layer.out_dim(); ++i) {
    double s = layer.bias[i];
    const double* w = layer.weights.data() + i * layer.in_dim();
    for (std::size_t j = 0; j < layer.in_dim(); ++j) s += w[j] * in[j];
    z[i] = s;
  }
  if (pre_act) *pre_act = z;
  if (layer.act == Activation::ReLU)
    for (double& v : z) v = v > 0.0 ? v : 0.0;
  return z;
}

double mse_loss(const std::vector<Vec>& predictions, const std::vector<Vec>& targets) {
  if (predictions.empty() || predictions.size() != targets.size())
    throw DataError("mse_loss: prediction/target batch mismatch");
  double total = 0.0;
  for (std::size_t s = 0; s < predictions.size(); ++s) {
    if (predictions[s].size() != targets[s].size())
      throw DataError("mse_loss: prediction/target dimension mismatch");
    for (std::size_t j = 0; j < predictions[s].size(); ++j) {
      double d = predictions[s][j] - targets[s][j];
      total += d * d;
    }
  }
  return total / static_cast<double>(predictions.size());
}

void adam_step(Vec& params, const Vec& grads, AdamState& state, const TrainConfig& cfg) {
  if (params.size() != grads.size()) throw NumericalError("adam_step: gradient size mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size()) throw NumericalError("adam_step: state size mismatch");
  ++state.step;
  double b1t = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  double b2t = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    double mhat = state.m[i] / b1t;
    double vhat = state.v[i] / b2t;
    params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
  }
}

MetricsReport compute_metrics(const std::vector<Vec>& predictions,
                              const std::vector<Vec>& targets) {
  if (predictions.empty() || predictions.size() != targets.size())
    throw DataError("compute_metrics: prediction/target batch mismatch");

  double ss_res = 0.0;
  double sum = 0.0, sum_sq = 0.0;
  double tmin = targets[0][0], tmax = targets[0][0];
  std::size_t count = 0;
  for (std::size_t s = 0; s < targets.size(); ++s) {
    if (predictions[s].size() != targets[s].size())
      throw DataError("compute_metrics: prediction/target dimension mismatch");
    for (std::size_t j = 0; j < targets[s].size(); ++j) {
      double t = targets[s][j];
      double d = predictions[s][j] - t;
      ss_res += d * d;
      sum += t;
      sum_sq += t * t;
      tmin = std::min(tmin, t);
      tmax = std::max(tmax, t);
      ++count;
    }
  }
  double n = static_cast<double>(count);
  double mean = sum / n;
  double var = sum_sq / n - mean * mean;
  if (var < 0.0) var = 0.0;
  if (!(var > 0.0)) throw NumericalError("compute_metrics: targets have zero variance, r2 undefined");

  MetricsReport m;
  m.mse = ss_res / n;
  m.rmse = std::sqrt(m.mse);
  m.r2 = 1.0 - ss_res / (var * n);
  m.nrmse_range = m.rmse / (tmax - tmin);
  m.nrmse_std = m.rmse / std::sqrt(var);
  return m;
}

std::string metrics_to_string(const MetricsReport& m) {
  std::ostringstream os;
  os << "mse=" << m.mse << " rmse=" << m.rmse << " r2=" << m.r2
     << " nrmse_range=" << m.nrmse_range << " nrmse_std=" << m.nrmse_std << "\n";
  return os.str();
}

}  // namespace qfem::nn
