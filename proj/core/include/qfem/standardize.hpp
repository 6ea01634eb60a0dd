#pragma once

#include <cmath>
#include <cstddef>

#include "qfem/linalg.hpp"

namespace qfem {

// Per-dimension zero-mean unit-variance transform. Dimensions with
// (near-)zero spread keep scale 1 so constant outputs, e.g. fixed
// support displacements, pass through without blowing up.
struct Standardizer {
  Vec mean;
  Vec scale;

  static Standardizer identity(std::size_t d) {
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    return s;
  }

  static Standardizer fit(const std::vector<Vec>& rows) {
    if (rows.empty()) throw DataError("standardizer: no rows to fit");
    std::size_t d = rows[0].size();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    for (const Vec& r : rows) {
      if (r.size() != d) throw DataError("standardizer: ragged rows");
      for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
    }
    for (double& m : s.mean) m /= static_cast<double>(rows.size());
    Vec var(d, 0.0);
    for (const Vec& r : rows)
      for (std::size_t j = 0; j < d; ++j) {
        double c = r[j] - s.mean[j];
        var[j] += c * c;
      }
    for (std::size_t j = 0; j < d; ++j) {
      double sd = std::sqrt(var[j] / static_cast<double>(rows.size()));
      s.scale[j] = sd > 1e-12 ? sd : 1.0;
    }
    return s;
  }

  std::size_t dim() const { return mean.size(); }

  Vec transform(const Vec& x) const {
    if (x.size() != mean.size()) throw DataError("standardizer: dimension mismatch");
    Vec out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
    return out;
  }

  Vec inverse(const Vec& x) const {
    if (x.size() != mean.size()) throw DataError("standardizer: dimension mismatch");
    Vec out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] * scale[j] + mean[j];
    return out;
  }
};

}  // namespace qfem
