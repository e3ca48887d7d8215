#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "uood/feature_store.hpp"
#include "uood/manifest.hpp"
#include "uood/shrinkage.hpp"

namespace uood {

struct EvalResult {
  std::string name;
  double auroc = 0.0;
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  double mean_score_in = 0.0;
  double mean_score_out = 0.0;
};

/// Fit on `train`, score both test sets, compare with AUROC.
EvalResult evaluate(const std::string& name, const FeatureSet& train, const FeatureSet& test_in,
                    const FeatureSet& test_out, Shrinkage shrinkage, unsigned threads = 1);

/// Loads the three files referenced by the manifest and runs evaluate().
EvalResult run_experiment(const ExperimentManifest& manifest, unsigned threads = 1);

/// Runs a batch of experiments concurrently; results keep manifest order.
std::vector<EvalResult> run_experiments(const std::vector<ExperimentManifest>& manifests, unsigned threads = 1);

struct RelativeRow {
  std::string name;
  std::string group;
  double auroc = 0.0;
  double relative = 0.0;  ///< auroc / mean auroc of its group
};

/// `groups[i]` is the task label of `results[i]`.
std::vector<RelativeRow> relative_performance(const std::vector<EvalResult>& results,
                                              const std::vector<std::string>& groups);

/// Per-class train and held-out test pools.
struct ClassPool {
  FeatureSet train;
  FeatureSet test;
};

struct ClassSweepOptions {
  std::size_t train_size = 0;  ///< total training rows per k; 0 = smallest train pool
  std::size_t test_size = 0;   ///< total in-distribution test rows per k; 0 = smallest test pool
  Shrinkage shrinkage = Shrinkage::LedoitWolf;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct ClassSweepRow {
  std::size_t k = 0;
  double auc_near = 0.0;
  double auc_far = 0.0;
};

/// For each k, trains on the first k pools with train_size / k rows drawn
/// without replacement from each (so the training size stays constant) and
/// tests against the matching test pools and both OOD sets.
std::vector<ClassSweepRow> class_count_sweep(const std::vector<ClassPool>& pools, const FeatureSet& ood_near,
                                             const FeatureSet& ood_far, const std::vector<std::size_t>& k_values,
                                             const ClassSweepOptions& options);

}  // namespace uood
