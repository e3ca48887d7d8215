#include "uood/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/QR>

#include "uood/error.hpp"

namespace uood {

namespace {

constexpr std::array<std::string_view, kShapeFeatureCount> kFeatureNames{
    "sides", "orientation", "color", "background", "position_x", "position_y", "size"};

// Encoded columns produced by each abstract feature.
std::vector<std::size_t> encoded_columns(ShapeFeature f) {
  switch (f) {
    case ShapeFeature::Sides: return {0};
    case ShapeFeature::Orientation: return {1, 2};
    case ShapeFeature::Color: return {3};
    case ShapeFeature::Background: return {4};
    case ShapeFeature::PositionX: return {5};
    case ShapeFeature::PositionY: return {6};
    case ShapeFeature::Size: return {7};
  }
  return {};
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

void validate(const SyntheticConfig& c) {
  if (c.n_train == 0 || c.n_test_in == 0 || c.n_test_out == 0) {
    throw Error(ErrorCode::InvalidRange, "sample counts must be positive");
  }
  if (!(c.noise_sigma >= 0.0) || !std::isfinite(c.noise_sigma)) {
    throw Error(ErrorCode::InvalidRange, "noise_sigma must be finite and >= 0");
  }
  bool any_fixed = false;
  for (std::size_t i = 0; i < kShapeFeatureCount; ++i) {
    const FeatureSpec& s = c.features[i];
    any_fixed = any_fixed || s.fixed;
    if (s.fixed) {
      if (!std::isfinite(s.value)) throw Error(ErrorCode::InvalidRange, "non-finite fixed value");
      continue;
    }
    if (!(s.lo <= s.hi) || !std::isfinite(s.lo) || !std::isfinite(s.hi)) {
      throw Error(ErrorCode::InvalidRange, std::string(kFeatureNames[i]) + ": empty or inverted range");
    }
    if (s.integer && (std::floor(s.lo) != s.lo || std::floor(s.hi) != s.hi)) {
      throw Error(ErrorCode::InvalidRange, std::string(kFeatureNames[i]) + ": integer range needs integral bounds");
    }
  }
  if (!c.ood.empty() && !any_fixed) {
    throw Error(ErrorCode::InvalidRange, "OOD changes requested but training has no fixed feature");
  }
  for (const auto& change : c.ood) {
    if (!std::isfinite(change.amount)) throw Error(ErrorCode::InvalidRange, "non-finite OOD amount");
  }
}

FeatureMatrix sample_shapes(const SyntheticConfig& c, std::size_t n, bool apply_ood, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  FeatureMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kShapeEncodedDim));
  std::array<double, kShapeFeatureCount> attr{};
  std::array<double, kShapeEncodedDim> row{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < kShapeFeatureCount; ++f) {
      const FeatureSpec& s = c.features[f];
      if (s.fixed) {
        attr[f] = s.value;
      } else if (s.integer) {
        std::uniform_int_distribution<long long> pick(static_cast<long long>(s.lo), static_cast<long long>(s.hi));
        attr[f] = static_cast<double>(pick(rng));
      } else {
        std::uniform_real_distribution<double> pick(s.lo, s.hi);
        attr[f] = pick(rng);
      }
    }
    if (apply_ood) {
      for (const auto& change : c.ood) {
        double& v = attr[static_cast<std::size_t>(change.feature)];
        v = change.mode == OodChange::Mode::Shift ? v + change.amount : change.amount;
      }
    }
    const double radians = attr[static_cast<std::size_t>(ShapeFeature::Orientation)] * std::numbers::pi / 180.0;
    row = {attr[0], std::sin(radians), std::cos(radians), attr[2], attr[3], attr[4], attr[5], attr[6]};
    for (std::size_t f = 0; f < kShapeFeatureCount; ++f) {
      if (!c.features[f].fixed || c.noise_sigma == 0.0) continue;
      for (std::size_t col : encoded_columns(static_cast<ShapeFeature>(f))) row[col] += c.noise_sigma * noise(rng);
    }
    for (std::size_t col = 0; col < kShapeEncodedDim; ++col) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) = static_cast<float>(row[col]);
    }
  }
  return out;
}

FeatureSet single_layer(FeatureMatrix m) {
  std::vector<LayerBlock> layers;
  layers.emplace_back(std::move(m));
  return FeatureSet(std::move(layers));
}

}  // namespace

std::string_view to_string(ShapeFeature f) noexcept { return kFeatureNames[static_cast<std::size_t>(f)]; }

std::optional<ShapeFeature> parse_shape_feature(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kShapeFeatureCount; ++i) {
    if (kFeatureNames[i] == name) return static_cast<ShapeFeature>(i);
  }
  return std::nullopt;
}

SyntheticSplit gen_synthetic(const SyntheticConfig& config) {
  validate(config);
  auto rng_train = stream(config.seed, 1);
  auto rng_in = stream(config.seed, 2);
  auto rng_out = stream(config.seed, 3);
  return {single_layer(sample_shapes(config, config.n_train, false, rng_train)),
          single_layer(sample_shapes(config, config.n_test_in, false, rng_in)),
          single_layer(sample_shapes(config, config.n_test_out, true, rng_out))};
}

SyntheticConfig broken_orientation_scenario(std::uint64_t seed) {
  SyntheticConfig c;
  c[ShapeFeature::Sides] = FeatureSpec::constant(5.0);
  c[ShapeFeature::Orientation] = FeatureSpec::constant(270.0);
  c[ShapeFeature::Color] = FeatureSpec::constant(1.0);
  c[ShapeFeature::Background] = FeatureSpec::constant(0.0);
  c[ShapeFeature::PositionX] = FeatureSpec::uniform(0.0, 1.0);
  c[ShapeFeature::PositionY] = FeatureSpec::uniform(0.0, 1.0);
  c[ShapeFeature::Size] = FeatureSpec::constant(1.0);
  c.ood = {{ShapeFeature::Orientation, OodChange::Mode::Shift, 90.0}};
  c.noise_sigma = 0.01;
  c.seed = seed;
  return c;
}

SyntheticConfig varying_shapes_scenario(std::uint64_t seed) {
  SyntheticConfig c = broken_orientation_scenario(seed);
  c[ShapeFeature::Sides] = FeatureSpec::integers(4, 10);
  c.ood = {{ShapeFeature::Sides, OodChange::Mode::Set, 5.0}};
  return c;
}

SyntheticSplit gen_planted_invariant(const PlantedInvariantConfig& c) {
  if (c.dim < 2 || c.n_train < 2 || c.n_test_in == 0 || c.n_test_out == 0) {
    throw Error(ErrorCode::InvalidRange, "planted invariant needs dim >= 2 and nonempty splits");
  }
  if (!(c.invariant_variance > 0.0) || !(c.min_variance > 0.0) || !(c.max_variance >= c.min_variance)) {
    throw Error(ErrorCode::InvalidRange, "variances must be positive and ordered");
  }
  const auto d = static_cast<Eigen::Index>(c.dim);
  auto rng_frame = stream(c.seed, 10);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd raw(d, d);
  for (Eigen::Index i = 0; i < raw.size(); ++i) raw.data()[i] = gauss(rng_frame);
  const Eigen::MatrixXd frame = Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ();

  Eigen::VectorXd sd(d);
  sd[0] = std::sqrt(c.invariant_variance);
  for (Eigen::Index k = 1; k < d; ++k) {
    const double t = d > 2 ? static_cast<double>(k - 1) / static_cast<double>(d - 2) : 0.0;
    sd[k] = std::sqrt(c.min_variance * std::pow(c.max_variance / c.min_variance, t));
  }
  Eigen::VectorXd offset(d);
  for (Eigen::Index k = 0; k < d; ++k) offset[k] = gauss(rng_frame);

  const auto draw = [&](std::size_t n, std::uint64_t id, bool shifted) {
    auto rng = stream(c.seed, id);
    FeatureMatrix out(static_cast<Eigen::Index>(n), d);
    Eigen::VectorXd latent(d);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index k = 0; k < d; ++k) latent[k] = sd[k] * gauss(rng);
      if (shifted) latent[0] += c.shift_sigmas * sd[0];
      out.row(i) = (offset + frame * latent).cast<float>().transpose();
    }
    return single_layer(std::move(out));
  };
  return {draw(c.n_train, 11, false), draw(c.n_test_in, 12, false), draw(c.n_test_out, 13, true)};
}

ClassPoolData gen_class_pools(const ClassPoolConfig& c) {
  if (c.class_sides.empty()) throw Error(ErrorCode::InvalidRange, "no classes configured");
  SyntheticConfig base = broken_orientation_scenario(c.seed);
  base.noise_sigma = c.noise_sigma;
  base.ood.clear();

  ClassPoolData data{{}, single_layer(FeatureMatrix::Zero(1, kShapeEncodedDim)),
                     single_layer(FeatureMatrix::Zero(1, kShapeEncodedDim))};
  for (std::size_t cls = 0; cls < c.class_sides.size(); ++cls) {
    SyntheticConfig cfg = base;
    cfg[ShapeFeature::Sides] = FeatureSpec::constant(c.class_sides[cls]);
    validate(cfg);
    auto rng_train = stream(c.seed, 100 + 2 * cls);
    auto rng_test = stream(c.seed, 101 + 2 * cls);
    data.pools.push_back({single_layer(sample_shapes(cfg, c.n_train_per_class, false, rng_train)),
                          single_layer(sample_shapes(cfg, c.n_test_per_class, false, rng_test))});
  }

  SyntheticConfig near = base;
  near[ShapeFeature::Sides] = FeatureSpec::constant(c.near_sides);
  auto rng_near = stream(c.seed, 50);
  data.ood_near = single_layer(sample_shapes(near, c.n_ood, false, rng_near));

  // Far samples mix all pool classes, so only the background separates them
  // from a model trained on every class.
  SyntheticConfig far = base;
  far[ShapeFeature::Sides] = FeatureSpec::integers(0, static_cast<int>(c.class_sides.size()) - 1);
  far.ood = {{ShapeFeature::Background, OodChange::Mode::Set, c.far_background}};
  auto rng_far = stream(c.seed, 51);
  FeatureMatrix far_rows = sample_shapes(far, c.n_ood, true, rng_far);
  for (Eigen::Index i = 0; i < far_rows.rows(); ++i) {
    const auto cls = static_cast<std::size_t>(std::lround(far_rows(i, 0)));
    far_rows(i, 0) = static_cast<float>(c.class_sides[cls]);
  }
  data.ood_far = single_layer(std::move(far_rows));
  return data;
}

}  // namespace uood
