#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

namespace uood {

/// Mann-Whitney statistic of `out` against `in`, kept in integers:
/// twice_u = 2 * #(out > in) + #(out == in) over all pairs.
struct RankStatistic {
  std::int64_t twice_u = 0;
  std::int64_t n_in = 0;
  std::int64_t n_out = 0;
};

/// Computed by one sort of the pooled scores with mid-rank tie handling.
/// Throws EmptyInput or NonFiniteScore.
RankStatistic rank_statistic(std::span<const double> scores_in, std::span<const double> scores_out);

/// twice_u / (2 n_in n_out), rounded once.
double auc_from_statistic(const RankStatistic& stat);

/// Area under the ROC curve with OOD (`scores_out`) as the positive class
/// and higher scores meaning more anomalous.
double auroc(std::span<const double> scores_in, std::span<const double> scores_out);
double auroc(const Eigen::VectorXd& scores_in, const Eigen::VectorXd& scores_out);

}  // namespace uood
