#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "uood/error.hpp"

namespace uood {

/// Row-major single-precision storage, one row per sample.
using FeatureMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Descriptors of N samples at one layer of the extractor.
class LayerBlock {
 public:
  explicit LayerBlock(FeatureMatrix data);

  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(data_.cols()); }
  [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  [[nodiscard]] const FeatureMatrix& data() const noexcept { return data_; }

  /// Promoted copy used by all downstream arithmetic.
  [[nodiscard]] Eigen::MatrixXd as_double() const { return data_.cast<double>(); }

 private:
  FeatureMatrix data_;
};

/// Immutable multi-layer feature collection. Construction validates that
/// there is at least one layer, every layer has the same number of rows,
/// no layer is zero-dimensional and every value is finite.
class FeatureSet {
 public:
  explicit FeatureSet(std::vector<LayerBlock> layers);

  [[nodiscard]] std::size_t layer_count() const noexcept { return layers_.size(); }
  [[nodiscard]] std::size_t sample_count() const noexcept { return layers_.front().rows(); }
  [[nodiscard]] const LayerBlock& layer(std::size_t index) const { return layers_.at(index); }
  [[nodiscard]] const std::vector<LayerBlock>& layers() const noexcept { return layers_; }
  [[nodiscard]] std::vector<std::size_t> dims() const;

  /// New set holding the given rows, in the given order.
  [[nodiscard]] FeatureSet select_rows(std::span<const std::size_t> rows) const;

  /// Same layers without the one at `index`; requires at least two layers.
  [[nodiscard]] FeatureSet without_layer(std::size_t index) const;

  friend bool operator==(const FeatureSet& a, const FeatureSet& b);

 private:
  std::vector<LayerBlock> layers_;
};

/// Stacks the rows of several sets with identical layer structure.
FeatureSet concat_rows(std::span<const FeatureSet> parts);

/// Throws DimensionMismatch / LayerCountMismatch unless `b` has the layer
/// structure of `a`.
void require_same_layout(const FeatureSet& a, const FeatureSet& b, std::string_view context);

/// Writes the UOFV1 binary format:
///   "UOFV" 0x01, u32 L, u32 N, then per layer u32 D followed by N*D
///   float32 values in row-major order, all little-endian.
void save_features(const FeatureSet& set, const std::filesystem::path& path);
FeatureSet load_features(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_features(const FeatureSet& set);
FeatureSet decode_features(std::span<const std::uint8_t> bytes);

}  // namespace uood
