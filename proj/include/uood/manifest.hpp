#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "uood/shrinkage.hpp"

namespace uood {

/// One `in:out` experiment: fit on `train`, score `test_in` and `test_out`.
struct ExperimentManifest {
  std::string name;
  std::filesystem::path train_path;
  std::filesystem::path test_in_path;
  std::filesystem::path test_out_path;
  Shrinkage shrinkage = Shrinkage::LedoitWolf;
};

struct ClassPoolPaths {
  std::filesystem::path train;
  std::filesystem::path test;
};

/// Input for the class-count sweep: per-class train/test pools, the two OOD
/// sets and the k values to evaluate. Sizes of 0 mean "smallest pool".
struct ClassSweepManifest {
  std::string name;
  std::vector<ClassPoolPaths> pools;
  std::filesystem::path ood_near;
  std::filesystem::path ood_far;
  std::vector<std::size_t> k_values;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  Shrinkage shrinkage = Shrinkage::LedoitWolf;
};

/// Parses a manifest file holding either one experiment object or an array
/// of them. Relative paths are resolved against the manifest's directory and
/// every referenced file must exist.
std::vector<ExperimentManifest> load_manifests(const std::filesystem::path& path);
std::vector<ExperimentManifest> parse_manifests(const std::string& json_text,
                                                const std::filesystem::path& base_dir);
void save_manifest(const ExperimentManifest& manifest, const std::filesystem::path& path);

ClassSweepManifest load_class_sweep_manifest(const std::filesystem::path& path);
void save_class_sweep_manifest(const ClassSweepManifest& manifest, const std::filesystem::path& path);

}  // namespace uood
