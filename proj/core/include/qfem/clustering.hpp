#pragma once

#include <string>

#include "qfem/linalg.hpp"
#include "qfem/nn.hpp"
#include "qfem/rng.hpp"

namespace qfem::cluster {

struct ClusterResult {
  Matrix centroids;  // k x dim
  std::vector<int> assignments;
  double wcss = 0.0;
  int iterations = 0;
  Vec wcss_history;  // end of each Lloyd iteration, non-increasing
};

// Lloyd iterations from explicit starting centroids. Assignment ties go
// to the lowest centroid index; a cluster that empties is reseeded with
// the point farthest from its own centroid. Stops when assignments are
// stable or the centroid shift falls below tol.
ClusterResult lloyd(const std::vector<Vec>& data, Matrix initial_centroids, int max_iter = 100,
                    double tol = 1e-8);

// k-means++ seeding, best of `restarts` runs by final WCSS.
ClusterResult kmeans(const std::vector<Vec>& data, int k, std::uint64_t seed, int restarts = 10,
                     int max_iter = 100, double tol = 1e-8);

// Mean silhouette over all samples; singleton clusters score 0.
double silhouette(const std::vector<Vec>& data, const std::vector<int>& assignments);

// Mean over clusters of the worst (scatter_i + scatter_j) / d(c_i, c_j).
// Lower is better; coincident centroids are an error.
double davies_bouldin(const std::vector<Vec>& data, const ClusterResult& clusters);

struct KSelectionRow {
  int k = 0;
  double wcss = 0.0;
  double silhouette = 0.0;
  double davies_bouldin = 0.0;
  double nrmse = 0.0;  // downstream ClusteredMLP, range-normalized
  double r2 = 0.0;
  bool trained = false;
  std::string note;
};

struct KSelectionReport {
  std::vector<KSelectionRow> rows;
};

// For each k: cluster the standardized sensors, then train a
// ClusteredMLP with that k under a reduced epoch budget and record its
// test metrics. Per-k training failures are annotated, not fatal.
KSelectionReport k_sweep(const std::vector<Vec>& sensors, const std::vector<Vec>& targets,
                         int k_min, int k_max, const nn::TrainConfig& train_cfg,
                         int sweep_epochs, std::uint64_t seed, int restarts = 10);

std::string report_to_csv(const KSelectionReport& report);

}  // namespace qfem::cluster
