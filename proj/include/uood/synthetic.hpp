#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "uood/experiment.hpp"
#include "uood/feature_store.hpp"

namespace uood {

/// Abstract attributes of a rendered geometric shape. They are encoded into
/// an 8-column layer: sides, sin(orientation), cos(orientation), color,
/// background, position x, position y, size.
enum class ShapeFeature : std::size_t { Sides, Orientation, Color, Background, PositionX, PositionY, Size };

inline constexpr std::size_t kShapeFeatureCount = 7;
inline constexpr std::size_t kShapeEncodedDim = 8;

std::string_view to_string(ShapeFeature f) noexcept;
std::optional<ShapeFeature> parse_shape_feature(std::string_view name) noexcept;

/// Fixed features take their value plus Gaussian noise on every encoded
/// column; varying ones are uniform over [lo, hi] (integers when
/// `integer` is set) and noise-free.
struct FeatureSpec {
  bool fixed = true;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool integer = false;

  static FeatureSpec constant(double v) { return {true, v, v, v, false}; }
  static FeatureSpec uniform(double lo, double hi) { return {false, 0.0, lo, hi, false}; }
  static FeatureSpec integers(int lo, int hi) { return {false, 0.0, double(lo), double(hi), true}; }
};

/// How test_out departs from the training distribution for one feature.
struct OodChange {
  enum class Mode { Shift, Set };
  ShapeFeature feature = ShapeFeature::Orientation;
  Mode mode = Mode::Shift;
  double amount = 0.0;
};

struct SyntheticConfig {
  std::size_t n_train = 1000;
  std::size_t n_test_in = 1000;
  std::size_t n_test_out = 1000;
  std::array<FeatureSpec, kShapeFeatureCount> features{
      FeatureSpec::constant(5.0),   FeatureSpec::constant(0.0), FeatureSpec::constant(1.0),
      FeatureSpec::constant(0.0),   FeatureSpec::constant(0.5), FeatureSpec::constant(0.5),
      FeatureSpec::constant(1.0)};
  std::vector<OodChange> ood;
  double noise_sigma = 0.01;
  std::uint64_t seed = 0;

  FeatureSpec& operator[](ShapeFeature f) { return features[static_cast<std::size_t>(f)]; }
  const FeatureSpec& operator[](ShapeFeature f) const { return features[static_cast<std::size_t>(f)]; }
};

struct SyntheticSplit {
  FeatureSet train;
  FeatureSet test_in;
  FeatureSet test_out;
};

/// Throws InvalidRange for empty/inverted ranges, negative noise, zero
/// sample counts, or an OOD change with no fixed feature to break.
SyntheticSplit gen_synthetic(const SyntheticConfig& config);

/// Pentagon at 270 degrees, fixed color and background, varying position;
/// test_out rotates it by 90 degrees.
SyntheticConfig broken_orientation_scenario(std::uint64_t seed = 0);

/// Shapes with 4..10 sides at a fixed orientation; test_out is all
/// pentagons at the training orientation.
SyntheticConfig varying_shapes_scenario(std::uint64_t seed = 0);

/// Gaussian data in a random orthonormal frame whose lowest-variance
/// direction is an (almost) exact invariant; test_out is shifted only along
/// that direction.
struct PlantedInvariantConfig {
  std::size_t dim = 16;
  std::size_t n_train = 2000;
  std::size_t n_test_in = 1000;
  std::size_t n_test_out = 1000;
  double invariant_variance = 1e-4;
  double min_variance = 0.1;  ///< of the remaining directions, spaced geometrically
  double max_variance = 10.0;
  double shift_sigmas = 10.0;  ///< OOD shift in invariant standard deviations
  std::uint64_t seed = 0;
};

SyntheticSplit gen_planted_invariant(const PlantedInvariantConfig& config);

/// Class pools that differ only in the number of sides. The near set is a
/// held-out side count; the far set has the class mix of the pools but
/// breaks the always-fixed background.
struct ClassPoolConfig {
  std::vector<int> class_sides{3, 4, 5, 6, 7, 8, 9, 10};
  int near_sides = 11;
  double far_background = 1.0;
  std::size_t n_train_per_class = 840;
  std::size_t n_test_per_class = 840;
  std::size_t n_ood = 1000;
  double noise_sigma = 0.01;
  std::uint64_t seed = 0;
};

struct ClassPoolData {
  std::vector<ClassPool> pools;
  FeatureSet ood_near;
  FeatureSet ood_far;
};

ClassPoolData gen_class_pools(const ClassPoolConfig& config);

}  // namespace uood
