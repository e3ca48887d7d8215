#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "uood/feature_store.hpp"
#include "uood/gaussian_model.hpp"

namespace uood {

/// Per-sample anomaly scores. per_layer(i, l) is the Mahalanobis distance
/// of sample i at layer l; total(i) is the sum over layers.
struct ScoreReport {
  Eigen::VectorXd total;
  Eigen::MatrixXd per_layer;

  [[nodiscard]] std::size_t sample_count() const noexcept { return static_cast<std::size_t>(total.size()); }
};

/// sqrt((f - mu)^T Sigma^-1 (f - mu)) for every row of `features`, computed
/// by forward substitution against the stored Cholesky factor.
Eigen::VectorXd score_layer(const LayerGaussian& layer, const Eigen::MatrixXd& features, unsigned threads = 1);

ScoreReport score(const GaussianModel& model, const FeatureSet& test, unsigned threads = 1);

}  // namespace uood
