#include "uood/maha_scorer.hpp"

#include <cmath>
#include <string>

#include "uood/error.hpp"
#include "uood/parallel.hpp"

namespace uood {

Eigen::VectorXd score_layer(const LayerGaussian& layer, const Eigen::MatrixXd& features, unsigned threads) {
  const Eigen::Index d = layer.mean.size();
  if (features.cols() != d) {
    throw Error(ErrorCode::DimensionMismatch, "features have " + std::to_string(features.cols()) +
                                                  " columns, model layer has " + std::to_string(d));
  }
  Eigen::VectorXd out(features.rows());
  const auto lower = layer.factor.triangularView<Eigen::Lower>();
  // One solve per sample keeps each result independent of how rows are
  // split across workers.
  parallel_for(static_cast<std::size_t>(features.rows()), threads, [&](std::size_t begin, std::size_t end) {
    Eigen::VectorXd z(d);
    for (auto i = static_cast<Eigen::Index>(begin); i < static_cast<Eigen::Index>(end); ++i) {
      z = features.row(i).transpose() - layer.mean;
      lower.solveInPlace(z);
      out[i] = std::sqrt(z.squaredNorm());
    }
  });
  return out;
}

ScoreReport score(const GaussianModel& model, const FeatureSet& test, unsigned threads) {
  if (test.layer_count() != model.layer_count()) {
    throw Error(ErrorCode::LayerCountMismatch, "test set has " + std::to_string(test.layer_count()) +
                                                   " layers, model has " + std::to_string(model.layer_count()));
  }
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    if (test.layer(l).dim() != model.layers[l].dim()) {
      throw Error(ErrorCode::DimensionMismatch, "layer " + std::to_string(l) + " has dim " +
                                                    std::to_string(test.layer(l).dim()) + ", model expects " +
                                                    std::to_string(model.layers[l].dim()));
    }
  }
  const auto m = static_cast<Eigen::Index>(test.sample_count());
  const auto layers = static_cast<Eigen::Index>(model.layer_count());
  ScoreReport report;
  report.per_layer.resize(m, layers);
  for (Eigen::Index l = 0; l < layers; ++l) {
    const auto idx = static_cast<std::size_t>(l);
    report.per_layer.col(l) = score_layer(model.layers[idx], test.layer(idx).as_double(), threads);
  }
  report.total.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double sum = 0.0;
    for (Eigen::Index l = 0; l < layers; ++l) sum += report.per_layer(i, l);
    report.total[i] = sum;
  }
  return report;
}

}  // namespace uood
