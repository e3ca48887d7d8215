#include "uood/experiment.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "uood/auroc.hpp"
#include "uood/error.hpp"
#include "uood/gaussian_model.hpp"
#include "uood/maha_scorer.hpp"
#include "uood/parallel.hpp"

namespace uood {

EvalResult evaluate(const std::string& name, const FeatureSet& train, const FeatureSet& test_in,
                    const FeatureSet& test_out, Shrinkage shrinkage, unsigned threads) {
  require_same_layout(train, test_in, name + " test_in");
  require_same_layout(train, test_out, name + " test_out");
  const GaussianModel model = fit_gaussian(train, shrinkage, threads);
  const ScoreReport in = score(model, test_in, threads);
  const ScoreReport out = score(model, test_out, threads);
  EvalResult r;
  r.name = name;
  r.auroc = auroc(in.total, out.total);
  r.n_in = in.sample_count();
  r.n_out = out.sample_count();
  r.mean_score_in = in.total.mean();
  r.mean_score_out = out.total.mean();
  return r;
}

EvalResult run_experiment(const ExperimentManifest& manifest, unsigned threads) {
  const FeatureSet train = load_features(manifest.train_path);
  const FeatureSet test_in = load_features(manifest.test_in_path);
  const FeatureSet test_out = load_features(manifest.test_out_path);
  return evaluate(manifest.name, train, test_in, test_out, manifest.shrinkage, threads);
}

std::vector<EvalResult> run_experiments(const std::vector<ExperimentManifest>& manifests, unsigned threads) {
  std::vector<EvalResult> results(manifests.size());
  const unsigned outer = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(manifests.size())));
  const unsigned inner = std::max(1u, threads / outer);
  parallel_for(manifests.size(), outer, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) results[i] = run_experiment(manifests[i], inner);
  });
  return results;
}

std::vector<RelativeRow> relative_performance(const std::vector<EvalResult>& results,
                                              const std::vector<std::string>& groups) {
  if (results.size() != groups.size()) {
    throw Error(ErrorCode::InvalidArgument, "every result needs exactly one group label");
  }
  if (results.empty()) throw Error(ErrorCode::EmptyGroup, "no results to summarize");
  std::map<std::string, std::pair<double, std::size_t>> sums;
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& [sum, count] = sums[groups[i]];
    sum += results[i].auroc;
    ++count;
  }
  std::vector<RelativeRow> rows;
  rows.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& [sum, count] = sums.at(groups[i]);
    const double mean = sum / static_cast<double>(count);
    if (!(mean > 0.0)) throw Error(ErrorCode::EmptyGroup, "group '" + groups[i] + "' has zero mean AUROC");
    rows.push_back({results[i].name, groups[i], results[i].auroc, results[i].auroc / mean});
  }
  return rows;
}

namespace {

std::vector<std::size_t> draw_without_replacement(std::size_t population, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates with a fixed engine; std::shuffle's algorithm is
  // implementation-defined.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (population - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

FeatureSet balanced_union(const std::vector<ClassPool>& pools, std::size_t k, std::size_t total, bool use_train,
                          std::mt19937_64& rng) {
  const std::size_t per_class = total / k;
  if (per_class == 0) {
    throw Error(ErrorCode::InsufficientSamples, "size " + std::to_string(total) + " cannot be split over " +
                                                    std::to_string(k) + " classes");
  }
  std::vector<FeatureSet> parts;
  for (std::size_t c = 0; c < k; ++c) {
    const FeatureSet& pool = use_train ? pools[c].train : pools[c].test;
    if (pool.sample_count() < per_class) {
      throw Error(ErrorCode::InsufficientSamples, "class " + std::to_string(c) + " has " +
                                                      std::to_string(pool.sample_count()) + " rows, need " +
                                                      std::to_string(per_class));
    }
    const auto rows = draw_without_replacement(pool.sample_count(), per_class, rng);
    parts.push_back(pool.select_rows(rows));
  }
  return concat_rows(parts);
}

}  // namespace

std::vector<ClassSweepRow> class_count_sweep(const std::vector<ClassPool>& pools, const FeatureSet& ood_near,
                                             const FeatureSet& ood_far, const std::vector<std::size_t>& k_values,
                                             const ClassSweepOptions& options) {
  if (pools.empty()) throw Error(ErrorCode::InsufficientSamples, "no class pools given");
  if (k_values.empty()) throw Error(ErrorCode::EmptyInput, "no k values given");
  for (const auto& pool : pools) {
    require_same_layout(pools.front().train, pool.train, "class pool train");
    require_same_layout(pools.front().train, pool.test, "class pool test");
  }
  require_same_layout(pools.front().train, ood_near, "ood_near");
  require_same_layout(pools.front().train, ood_far, "ood_far");

  std::size_t train_size = options.train_size;
  std::size_t test_size = options.test_size;
  if (train_size == 0 || test_size == 0) {
    std::size_t min_train = pools.front().train.sample_count();
    std::size_t min_test = pools.front().test.sample_count();
    for (const auto& p : pools) {
      min_train = std::min(min_train, p.train.sample_count());
      min_test = std::min(min_test, p.test.sample_count());
    }
    if (train_size == 0) train_size = min_train;
    if (test_size == 0) test_size = min_test;
  }

  std::vector<ClassSweepRow> rows;
  rows.reserve(k_values.size());
  for (std::size_t k : k_values) {
    if (k == 0 || k > pools.size()) {
      throw Error(ErrorCode::InsufficientSamples, "k = " + std::to_string(k) + " but only " +
                                                      std::to_string(pools.size()) + " class pools");
    }
    // Seeding per k makes each row independent of which other k are listed.
    std::mt19937_64 rng(options.seed * 1000003ULL + k);
    const FeatureSet train = balanced_union(pools, k, train_size, true, rng);
    const FeatureSet test_in = balanced_union(pools, k, test_size, false, rng);
    const GaussianModel model = fit_gaussian(train, options.shrinkage, options.threads);
    const Eigen::VectorXd in = score(model, test_in, options.threads).total;
    ClassSweepRow row;
    row.k = k;
    row.auc_near = auroc(in, score(model, ood_near, options.threads).total);
    row.auc_far = auroc(in, score(model, ood_far, options.threads).total);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace uood
