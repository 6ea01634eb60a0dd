#include "qfem/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qfem/numeric_io.hpp"
#include "qfem/standardize.hpp"
#include "qfem/train.hpp"

namespace qfem::cluster {

namespace {

double sq_dist(const Vec& a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

double sq_dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

void check_data(const std::vector<Vec>& data, std::size_t k) {
  if (data.empty()) throw DataError("kmeans: empty dataset");
  if (k < 1) throw ConfigError("kmeans: k must be at least 1");
  if (k > data.size()) throw DataError("kmeans: more clusters than samples");
  for (const Vec& row : data) {
    if (row.size() != data[0].size()) throw DataError("kmeans: ragged rows");
    if (!all_finite(row)) throw DataError("kmeans: non-finite sample");
  }
}

}  // namespace

ClusterResult lloyd(const std::vector<Vec>& data, Matrix centroids, int max_iter, double tol) {
  std::size_t k = centroids.rows();
  check_data(data, k);
  std::size_t dim = data[0].size();
  if (centroids.cols() != dim) throw DataError("lloyd: centroid dimension mismatch");
  if (max_iter < 1) throw ConfigError("lloyd: max_iter must be positive");

  ClusterResult res;
  res.assignments.assign(data.size(), -1);
  std::vector<std::size_t> counts(k, 0);
  Matrix sums(k, dim);

  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < data.size(); ++i) {
      int best = 0;
      double best_d = sq_dist(data[i], centroids.data(), dim);
      for (std::size_t c = 1; c < k; ++c) {
        double d = sq_dist(data[i], centroids.data() + c * dim, dim);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (res.assignments[i] != best) {
        res.assignments[i] = best;
        changed = true;
      }
    }

    std::fill(counts.begin(), counts.end(), 0);
    std::fill(sums.data(), sums.data() + k * dim, 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::size_t c = static_cast<std::size_t>(res.assignments[i]);
      ++counts[c];
      for (std::size_t j = 0; j < dim; ++j) sums(c, j) += data[i][j];
    }

    // Reseed any emptied cluster with the point farthest from its own
    // centroid, then redo the update on the next pass.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        std::size_t own = static_cast<std::size_t>(res.assignments[i]);
        double d = sq_dist(data[i], centroids.data() + own * dim, dim);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      for (std::size_t j = 0; j < dim; ++j) centroids(c, j) = data[far][j];
      res.assignments[far] = static_cast<int>(c);
      changed = true;
      std::fill(counts.begin(), counts.end(), 0);
      std::fill(sums.data(), sums.data() + k * dim, 0.0);
      for (std::size_t i = 0; i < data.size(); ++i) {
        std::size_t cc = static_cast<std::size_t>(res.assignments[i]);
        ++counts[cc];
        for (std::size_t j = 0; j < dim; ++j) sums(cc, j) += data[i][j];
      }
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < dim; ++j) {
        double next = sums(c, j) / static_cast<double>(counts[c]);
        double d = next - centroids(c, j);
        shift += d * d;
        centroids(c, j) = next;
      }
    }

    double wcss = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
      wcss += sq_dist(data[i], centroids.data() +
                                   static_cast<std::size_t>(res.assignments[i]) * dim,
                      dim);
    res.wcss_history.push_back(wcss);
    res.iterations = iter + 1;

    if (!changed || std::sqrt(shift) < tol) break;
  }

  // Final assignment against the settled centroids.
  for (std::size_t i = 0; i < data.size(); ++i) {
    int best = 0;
    double best_d = sq_dist(data[i], centroids.data(), dim);
    for (std::size_t c = 1; c < k; ++c) {
      double d = sq_dist(data[i], centroids.data() + c * dim, dim);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    res.assignments[i] = best;
  }
  double wcss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    wcss += sq_dist(data[i],
                    centroids.data() + static_cast<std::size_t>(res.assignments[i]) * dim, dim);
  res.wcss = wcss;
  res.centroids = std::move(centroids);
  return res;
}

namespace {

Matrix kmeanspp_seed(const std::vector<Vec>& data, std::size_t k, Rng& rng) {
  std::size_t dim = data[0].size();
  Matrix centroids(k, dim);
  std::size_t first = rng.index(data.size());
  for (std::size_t j = 0; j < dim; ++j) centroids(0, j) = data[first][j];

  Vec dmin(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    dmin[i] = sq_dist(data[i], centroids.data(), dim);

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : dmin) total += d;
    std::size_t pick;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      double acc = 0.0;
      pick = data.size() - 1;
      for (std::size_t i = 0; i < data.size(); ++i) {
        acc += dmin[i];
        if (acc > u) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.index(data.size());  // all points coincide with a centroid
    }
    for (std::size_t j = 0; j < dim; ++j) centroids(c, j) = data[pick][j];
    for (std::size_t i = 0; i < data.size(); ++i)
      dmin[i] = std::min(dmin[i], sq_dist(data[i], centroids.data() + c * dim, dim));
  }
  return centroids;
}

}  // namespace

ClusterResult kmeans(const std::vector<Vec>& data, int k, std::uint64_t seed, int restarts,
                     int max_iter, double tol) {
  check_data(data, static_cast<std::size_t>(k));
  if (restarts < 1) throw ConfigError("kmeans: restarts must be positive");

  ClusterResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, "kmeans:" + std::to_string(r)));
    Matrix init = kmeanspp_seed(data, static_cast<std::size_t>(k), rng);
    ClusterResult res = lloyd(data, std::move(init), max_iter, tol);
    if (res.wcss < best.wcss) best = std::move(res);
  }
  return best;
}

double silhouette(const std::vector<Vec>& data, const std::vector<int>& assignments) {
  if (data.empty() || data.size() != assignments.size())
    throw DataError("silhouette: data/assignment mismatch");
  int k = 0;
  for (int a : assignments) k = std::max(k, a + 1);
  if (k < 2) throw DataError("silhouette: needs at least two clusters");

  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (int a : assignments) ++counts[static_cast<std::size_t>(a)];

  double total = 0.0;
  Vec mean_d(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::fill(mean_d.begin(), mean_d.end(), 0.0);
    for (std::size_t j = 0; j < data.size(); ++j) {
      if (i == j) continue;
      mean_d[static_cast<std::size_t>(assignments[j])] += std::sqrt(sq_dist(data[i], data[j]));
    }
    std::size_t own = static_cast<std::size_t>(assignments[i]);
    if (counts[own] <= 1) continue;  // singleton scores 0
    double a = mean_d[own] / static_cast<double>(counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
      if (c == own || counts[c] == 0) continue;
      b = std::min(b, mean_d[c] / static_cast<double>(counts[c]));
    }
    double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(data.size());
}

double davies_bouldin(const std::vector<Vec>& data, const ClusterResult& clusters) {
  std::size_t k = clusters.centroids.rows();
  if (k < 2) throw DataError("davies_bouldin: needs at least two clusters");
  if (data.empty() || data.size() != clusters.assignments.size())
    throw DataError("davies_bouldin: data/assignment mismatch");
  std::size_t dim = clusters.centroids.cols();

  Vec scatter(k, 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::size_t c = static_cast<std::size_t>(clusters.assignments[i]);
    scatter[c] += std::sqrt(sq_dist(data[i], clusters.centroids.data() + c * dim, dim));
    ++counts[c];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) throw DataError("davies_bouldin: empty cluster");
    scatter[c] /= static_cast<double>(counts[c]);
  }

  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      double cd = 0.0;
      for (std::size_t m = 0; m < dim; ++m) {
        double d = clusters.centroids(i, m) - clusters.centroids(j, m);
        cd += d * d;
      }
      cd = std::sqrt(cd);
      if (cd == 0.0) throw NumericalError("davies_bouldin: coincident centroids");
      worst = std::max(worst, (scatter[i] + scatter[j]) / cd);
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

KSelectionReport k_sweep(const std::vector<Vec>& sensors, const std::vector<Vec>& targets,
                         int k_min, int k_max, const nn::TrainConfig& train_cfg,
                         int sweep_epochs, std::uint64_t seed, int restarts) {
  if (k_min < 2) throw ConfigError("k_sweep: k_min must be at least 2");
  if (k_max < k_min) throw ConfigError("k_sweep: k_max must be >= k_min");
  if (sweep_epochs < 1) throw ConfigError("k_sweep: sweep_epochs must be positive");

  Standardizer std_in = Standardizer::fit(sensors);
  std::vector<Vec> z;
  z.reserve(sensors.size());
  for (const Vec& s : sensors) z.push_back(std_in.transform(s));

  KSelectionReport report;
  for (int k = k_min; k <= k_max; ++k) {
    KSelectionRow row;
    row.k = k;
    ClusterResult res = kmeans(z, k, derive_seed(seed, "sweep"), restarts);
    row.wcss = res.wcss;
    row.silhouette = silhouette(z, res.assignments);
    row.davies_bouldin = davies_bouldin(z, res);

    try {
      nn::VariantSpec spec;
      spec.variant = nn::Variant::ClusteredMLP;
      spec.sensor_dim = static_cast<int>(sensors[0].size());
      spec.output_dim = static_cast<int>(targets[0].size());
      spec.cluster_k = k;
      nn::TrainConfig cfg = train_cfg;
      cfg.max_epochs = sweep_epochs;
      cfg.seed = seed;  // same split and init stream for every k
      Rng init_rng(derive_seed(seed, "sweep-init"));
      nn::HybridModel model = nn::build_variant(spec, init_rng);
      nn::TrainResult tr = nn::train(model, sensors, targets, cfg);
      nn::MetricsReport m = tr.split.test.empty()
                                ? nn::evaluate(model, sensors, targets, tr.split.val,
                                               cfg.threads)
                                : nn::evaluate(model, sensors, targets, tr.split.test,
                                               cfg.threads);
      row.nrmse = m.nrmse_range;
      row.r2 = m.r2;
      row.trained = true;
    } catch (const Error& e) {
      row.trained = false;
      row.note = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string report_to_csv(const KSelectionReport& report) {
  std::ostringstream os;
  os << "k,wcss,silhouette,davies_bouldin,nrmse_range,r2,note\n";
  for (const KSelectionRow& r : report.rows) {
    os << r.k << ',' << format_double(r.wcss) << ',' << format_double(r.silhouette) << ','
       << format_double(r.davies_bouldin) << ',';
    if (r.trained)
      os << format_double(r.nrmse) << ',' << format_double(r.r2) << ',';
    else
      os << "nan,nan," << r.note;
    os << '\n';
  }
  return os.str();
}

}  // namespace qfem::cluster
