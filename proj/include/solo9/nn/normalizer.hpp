#pragma once

#include "solo9/core/types.hpp"

namespace solo9 {

/// Running per-dimension mean/variance via Chan's pooled update, so that two
/// sequential batch updates equal one concatenated update exactly.
struct RunningNormalizer {
  VecX mean;
  VecX m2;  // sum of squared deviations
  double count = 0.0;
  double var_floor = 1e-8;

  explicit RunningNormalizer(int dim = 0)
      : mean(VecX::Zero(dim)), m2(VecX::Zero(dim)) {}

  int dim() const { return static_cast<int>(mean.size()); }

  void update(const MatX& batch) {
    if (batch.cols() == 0) throw ValidationError("normalizer update needs a non-empty batch");
    if (batch.rows() != mean.size()) throw ValidationError("normalizer dim mismatch");
    double n = static_cast<double>(batch.cols());
    VecX bmean = batch.rowwise().mean();
    VecX bm2 = (batch.colwise() - bmean).rowwise().squaredNorm();
    if (count == 0.0) {
      mean = bmean;
      m2 = bm2;
      count = n;
      return;
    }
    VecX delta = bmean - mean;
    double total = count + n;
    m2 += bm2 + delta.cwiseProduct(delta) * (count * n / total);
    mean += delta * (n / total);
    count = total;
  }

  VecX variance() const {
    if (count <= 0) return VecX::Ones(mean.size());
    return (m2 / count).cwiseMax(var_floor);
  }
  VecX stddev() const { return variance().cwiseSqrt(); }

  VecX normalize(const Eigen::Ref<const VecX>& x) const {
    if (count <= 0) return x;
    return (x - mean).cwiseQuotient(stddev());
  }
  MatX normalize_cols(const MatX& x) const {
    if (count <= 0) return x;
    return (x.colwise() - mean).array().colwise() / stddev().array();
  }
  VecX denormalize(const Eigen::Ref<const VecX>& z) const {
    if (count <= 0) return z;
    return z.cwiseProduct(stddev()) + mean;
  }
};

}  // namespace solo9
