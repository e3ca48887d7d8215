#include "uood/auroc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "uood/error.hpp"

namespace uood {

RankStatistic rank_statistic(std::span<const double> scores_in, std::span<const double> scores_out) {
  if (scores_in.empty() || scores_out.empty()) throw Error(ErrorCode::EmptyInput, "AUROC needs both score sets");
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(scores_in.begin(), scores_in.end(), finite) ||
      !std::all_of(scores_out.begin(), scores_out.end(), finite)) {
    throw Error(ErrorCode::NonFiniteScore, "AUROC input contains NaN or Inf");
  }

  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> pooled;
  pooled.reserve(scores_in.size() + scores_out.size());
  for (double s : scores_in) pooled.push_back({s, false});
  for (double s : scores_out) pooled.push_back({s, true});
  std::sort(pooled.begin(), pooled.end(), [](const Entry& a, const Entry& b) { return a.score < b.score; });

  // Doubled mid-rank of a tie group occupying 0-based positions [i, j) is
  // (i + 1) + j, which keeps everything integral.
  std::int64_t rank_sum_x2 = 0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i + 1;
    while (j < pooled.size() && pooled[j].score == pooled[i].score) ++j;
    std::int64_t positives = 0;
    for (std::size_t k = i; k < j; ++k) positives += pooled[k].positive ? 1 : 0;
    rank_sum_x2 += positives * static_cast<std::int64_t>(i + 1 + j);
    i = j;
  }

  RankStatistic stat;
  stat.n_in = static_cast<std::int64_t>(scores_in.size());
  stat.n_out = static_cast<std::int64_t>(scores_out.size());
  stat.twice_u = rank_sum_x2 - stat.n_out * (stat.n_out + 1);
  return stat;
}

double auc_from_statistic(const RankStatistic& stat) {
  // Both operands are exact integers below 2^53, so this is correctly rounded.
  return static_cast<double>(stat.twice_u) / static_cast<double>(2 * stat.n_in * stat.n_out);
}

double auroc(std::span<const double> scores_in, std::span<const double> scores_out) {
  return auc_from_statistic(rank_statistic(scores_in, scores_out));
}

double auroc(const Eigen::VectorXd& scores_in, const Eigen::VectorXd& scores_out) {
  return auroc(std::span<const double>(scores_in.data(), static_cast<std::size_t>(scores_in.size())),
               std::span<const double>(scores_out.data(), static_cast<std::size_t>(scores_out.size())));
}

}  // namespace uood
