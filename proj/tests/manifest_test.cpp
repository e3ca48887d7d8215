#include "uood/manifest.hpp"

#include <fstream>

#include <gtest/gtest.h>

#include "support/expect_error.hpp"
#include "support/oracles.hpp"
#include "uood/feature_store.hpp"

namespace uood {
namespace {

using testing::code_of;
using testing::TempDir;

class ManifestTest : public ::testing::Test {
 protected:
  void SetUp() override {
    for (const char* name : {"a.uof", "b.uof", "c.uof"}) {
      save_features(testing::single(FeatureMatrix::Ones(2, 2)), dir / name);
    }
  }
  void write(const std::string& name, const std::string& text) { std::ofstream(dir / name) << text; }

  TempDir dir;
};

TEST_F(ManifestTest, SingleObjectWithRelativePaths) {
  write("m.json", R"({"name": "CIFAR10:SVHN", "train": "a.uof", "test_in": "b.uof", "test_out": "c.uof",
                      "shrinkage": "none"})");
  const auto ms = load_manifests(dir / "m.json");
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].name, "CIFAR10:SVHN");
  EXPECT_EQ(ms[0].train_path, dir / "a.uof");
  EXPECT_EQ(ms[0].test_out_path, dir / "c.uof");
  EXPECT_EQ(ms[0].shrinkage, Shrinkage::None);
}

TEST_F(ManifestTest, ArrayAndDefaultShrinkage) {
  write("m.json", R"([{"name": "x:y", "train": "a.uof", "test_in": "b.uof", "test_out": "c.uof"},
                      {"name": "y:x", "train": "b.uof", "test_in": "a.uof", "test_out": "c.uof"}])");
  const auto ms = load_manifests(dir / "m.json");
  ASSERT_EQ(ms.size(), 2u);
  EXPECT_EQ(ms[0].shrinkage, Shrinkage::LedoitWolf);
  EXPECT_EQ(ms[1].name, "y:x");
}

TEST_F(ManifestTest, MissingReferencedFileNamesPath) {
  write("m.json", R"({"train": "a.uof", "test_in": "nope.uof", "test_out": "c.uof"})");
  try {
    load_manifests(dir / "m.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
    EXPECT_NE(std::string(e.what()).find("nope.uof"), std::string::npos);
  }
}

TEST_F(ManifestTest, MalformedInputs) {
  write("bad.json", "{not json");
  EXPECT_EQ(code_of([&] { load_manifests(dir / "bad.json"); }), ErrorCode::BadManifest);
  write("shr.json", R"({"train": "a.uof", "test_in": "b.uof", "test_out": "c.uof", "shrinkage": "oas"})");
  EXPECT_EQ(code_of([&] { load_manifests(dir / "shr.json"); }), ErrorCode::BadManifest);
  write("field.json", R"({"train": "a.uof", "test_in": "b.uof"})");
  EXPECT_EQ(code_of([&] { load_manifests(dir / "field.json"); }), ErrorCode::BadManifest);
  write("empty.json", "[]");
  EXPECT_EQ(code_of([&] { load_manifests(dir / "empty.json"); }), ErrorCode::BadManifest);
}

TEST_F(ManifestTest, SaveThenLoad) {
  const ExperimentManifest m{"p:q", "a.uof", "b.uof", "c.uof", Shrinkage::None};
  save_manifest(m, dir / "saved.json");
  const auto back = load_manifests(dir / "saved.json");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].name, "p:q");
  EXPECT_EQ(back[0].test_in_path, dir / "b.uof");
  EXPECT_EQ(back[0].shrinkage, Shrinkage::None);
}

TEST_F(ManifestTest, ClassSweepManifest) {
  ClassSweepManifest m;
  m.pools = {{"a.uof", "b.uof"}, {"b.uof", "a.uof"}};
  m.ood_near = "c.uof";
  m.ood_far = "c.uof";
  m.k_values = {1, 2};
  m.train_size = 4;
  save_class_sweep_manifest(m, dir / "classes.json");
  const auto back = load_class_sweep_manifest(dir / "classes.json");
  ASSERT_EQ(back.pools.size(), 2u);
  EXPECT_EQ(back.pools[1].train, dir / "b.uof");
  EXPECT_EQ(back.k_values, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(back.train_size, 4u);
  EXPECT_EQ(back.test_size, 0u);

  write("nok.json", R"({"pools": [{"train": "a.uof", "test": "b.uof"}], "ood_near": "c.uof", "ood_far": "c.uof"})");
  EXPECT_EQ(load_class_sweep_manifest(dir / "nok.json").k_values, (std::vector<std::size_t>{1}));
}

TEST(Shrinkage, ParseAndPrint) {
  EXPECT_EQ(parse_shrinkage("ledoit_wolf"), Shrinkage::LedoitWolf);
  EXPECT_EQ(parse_shrinkage("none"), Shrinkage::None);
  EXPECT_EQ(to_string(Shrinkage::LedoitWolf), "ledoit_wolf");
  EXPECT_EQ(code_of([] { parse_shrinkage("LW"); }), ErrorCode::InvalidArgument);
}

}  // namespace
}  // namespace uood
