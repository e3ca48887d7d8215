#include "uood/experiment.hpp"

#include <random>

#include <gtest/gtest.h>

#include "support/expect_error.hpp"
#include "support/oracles.hpp"
#include "uood/synthetic.hpp"

namespace uood {
namespace {

using testing::code_of;

struct GaussianSplits {
  FeatureSet train, test_in, test_out;
};

GaussianSplits gaussian_splits(std::uint64_t seed, double shift) {
  std::mt19937_64 rng(seed);
  const Eigen::Index d = 6;
  return {testing::from_double(testing::random_gaussian(rng, 1000, d)),
          testing::from_double(testing::random_gaussian(rng, 1000, d)),
          testing::from_double(testing::random_gaussian(rng, 1000, d).array() + shift)};
}

TEST(Evaluate, ShiftedOutSetSeparates) {
  const auto s = gaussian_splits(1, 10.0);
  const EvalResult r = evaluate("N:N+10", s.train, s.test_in, s.test_out, Shrinkage::LedoitWolf);
  EXPECT_GE(r.auroc, 0.999);
  EXPECT_EQ(r.n_in, 1000u);
  EXPECT_EQ(r.n_out, 1000u);
  EXPECT_LT(r.mean_score_in, r.mean_score_out);
}

TEST(Evaluate, SameDistributionIsNearChance) {
  for (std::uint64_t seed : {2, 3, 4}) {
    const auto s = gaussian_splits(seed, 0.0);
    const EvalResult r = evaluate("N:N", s.train, s.test_in, s.test_out, Shrinkage::LedoitWolf);
    EXPECT_GE(r.auroc, 0.45);
    EXPECT_LE(r.auroc, 0.55);
  }
}

class ManifestRun : public ::testing::Test {
 protected:
  void write(const FeatureSet& train, const FeatureSet& in, const FeatureSet& out) {
    save_features(train, dir / "train.uof");
    save_features(in, dir / "in.uof");
    save_features(out, dir / "out.uof");
  }
  ExperimentManifest manifest(const std::string& name = "a:b") const {
    return {name, dir / "train.uof", dir / "in.uof", dir / "out.uof", Shrinkage::LedoitWolf};
  }
  testing::TempDir dir;
};

TEST_F(ManifestRun, MatchesInMemoryEvaluation) {
  const auto s = gaussian_splits(5, 1.0);
  write(s.train, s.test_in, s.test_out);
  const EvalResult from_files = run_experiment(manifest());
  const EvalResult direct = evaluate("a:b", s.train, s.test_in, s.test_out, Shrinkage::LedoitWolf);
  EXPECT_EQ(from_files.auroc, direct.auroc);
  EXPECT_EQ(from_files.mean_score_out, direct.mean_score_out);
}

TEST_F(ManifestRun, LayerCountMismatch) {
  std::mt19937_64 rng(6);
  write(testing::correlated_set(rng, 20, {3, 2}), testing::correlated_set(rng, 5, {3, 2}),
        testing::correlated_set(rng, 5, {3}));
  EXPECT_EQ(code_of([&] { run_experiment(manifest()); }), ErrorCode::LayerCountMismatch);
}

TEST_F(ManifestRun, DimensionMismatch) {
  std::mt19937_64 rng(7);
  write(testing::correlated_set(rng, 20, {3}), testing::correlated_set(rng, 5, {4}),
        testing::correlated_set(rng, 5, {3}));
  EXPECT_EQ(code_of([&] { run_experiment(manifest()); }), ErrorCode::DimensionMismatch);
}

TEST_F(ManifestRun, BatchKeepsOrderAndIgnoresThreadCount) {
  const auto s = gaussian_splits(8, 0.5);
  write(s.train, s.test_in, s.test_out);
  std::vector<ExperimentManifest> batch;
  for (int i = 0; i < 5; ++i) {
    auto m = manifest("exp" + std::to_string(i));
    m.shrinkage = i % 2 ? Shrinkage::None : Shrinkage::LedoitWolf;
    batch.push_back(m);
  }
  const auto one = run_experiments(batch, 1);
  const auto many = run_experiments(batch, 8);
  ASSERT_EQ(one.size(), batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_EQ(many[i].name, "exp" + std::to_string(i));
    EXPECT_EQ(one[i].auroc, many[i].auroc);
    EXPECT_EQ(one[i].mean_score_in, many[i].mean_score_in);
  }
}

TEST(RelativePerformance, DividesByGroupMean) {
  const auto rows = relative_performance(
      {{"a", 0.6}, {"b", 0.9}, {"c", 0.8}, {"d", 0.8}, {"e", 0.7}}, {"t1", "t1", "t2", "t2", "t3"});
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_DOUBLE_EQ(rows[0].relative, 0.8);
  EXPECT_DOUBLE_EQ(rows[1].relative, 1.2);
  EXPECT_EQ(rows[2].relative, 1.0);
  EXPECT_EQ(rows[3].relative, 1.0);
  EXPECT_EQ(rows[4].relative, 1.0);
  EXPECT_EQ(rows[4].group, "t3");
}

TEST(RelativePerformance, Errors) {
  EXPECT_EQ(code_of([] { relative_performance({}, {}); }), ErrorCode::EmptyGroup);
  EXPECT_EQ(code_of([] { relative_performance({{"a", 0.5}}, {}); }), ErrorCode::InvalidArgument);
}

class ClassSweep : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ClassPoolConfig cfg;
    cfg.n_train_per_class = 420;
    cfg.n_test_per_class = 420;
    cfg.n_ood = 500;
    data_ = new ClassPoolData(gen_class_pools(cfg));
  }
  static void TearDownTestSuite() { delete data_; }
  static ClassPoolData* data_;
};
ClassPoolData* ClassSweep::data_ = nullptr;

TEST_F(ClassSweep, SingleClassEqualsPlainExperiment) {
  const auto rows = class_count_sweep(data_->pools, data_->ood_near, data_->ood_far, {1}, {});
  const auto& pool = data_->pools[0];
  const EvalResult near = evaluate("c0:near", pool.train, pool.test, data_->ood_near, Shrinkage::LedoitWolf);
  const EvalResult far = evaluate("c0:far", pool.train, pool.test, data_->ood_far, Shrinkage::LedoitWolf);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].auc_near, near.auroc);
  EXPECT_EQ(rows[0].auc_far, far.auroc);
}

TEST_F(ClassSweep, NearDecaysWhileFarHolds) {
  const std::vector<std::size_t> ks{1, 2, 3, 4, 5, 6, 7, 8};
  const auto rows = class_count_sweep(data_->pools, data_->ood_near, data_->ood_far, ks, {});
  ASSERT_EQ(rows.size(), ks.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].k, ks[i]);
    EXPECT_GE(rows[i].auc_far, 0.95);
    if (i > 0) EXPECT_LE(rows[i].auc_near, rows[i - 1].auc_near + 0.02);
  }
  EXPECT_LT(rows.back().auc_near, rows.front().auc_near);
}

TEST_F(ClassSweep, SeedControlsSubsampling) {
  ClassSweepOptions a, b;
  a.seed = 1;
  b.seed = 1;
  const auto x = class_count_sweep(data_->pools, data_->ood_near, data_->ood_far, {3}, a);
  const auto y = class_count_sweep(data_->pools, data_->ood_near, data_->ood_far, {3}, b);
  EXPECT_EQ(x[0].auc_near, y[0].auc_near);
}

TEST_F(ClassSweep, InsufficientSamples) {
  EXPECT_EQ(code_of([&] { class_count_sweep(data_->pools, data_->ood_near, data_->ood_far, {9}, {}); }),
            ErrorCode::InsufficientSamples);
  ClassSweepOptions too_big;
  too_big.train_size = 10'000;
  EXPECT_EQ(code_of([&] { class_count_sweep(data_->pools, data_->ood_near, data_->ood_far, {2}, too_big); }),
            ErrorCode::InsufficientSamples);
  EXPECT_EQ(code_of([&] { class_count_sweep({}, data_->ood_near, data_->ood_far, {1}, {}); }),
            ErrorCode::InsufficientSamples);
}

}  // namespace
}  // namespace uood
