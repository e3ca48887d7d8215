#include "uood/feature_store.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace uood {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::ZeroDimension: return "ZeroDimension";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::BadManifest: return "BadManifest";
    case ErrorCode::BadModel: return "BadModel";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LayerCountMismatch: return "LayerCountMismatch";
    case ErrorCode::AllErrorsZero: return "AllErrorsZero";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
  }
  return "Unknown";
}

namespace {

constexpr std::array<std::uint8_t, 5> kMagic{'U', 'O', 'F', 'V', 0x01};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  float f32() { return std::bit_cast<float>(u32("payload")); }

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::Truncated, std::string("file ends inside ") + what);
    }
  }

  [[nodiscard]] std::size_t position() const noexcept { return pos_; }
  void skip(std::size_t n) { pos_ += n; }
  [[nodiscard]] std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void require_finite(const FeatureMatrix& m, std::size_t layer) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::NonFiniteValue, "layer " + std::to_string(layer) + " contains NaN or Inf");
  }
}

}  // namespace

LayerBlock::LayerBlock(FeatureMatrix data) : data_(std::move(data)) {
  if (data_.cols() == 0) throw Error(ErrorCode::ZeroDimension, "layer has zero columns");
}

FeatureSet::FeatureSet(std::vector<LayerBlock> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw Error(ErrorCode::ZeroDimension, "feature set has no layers");
  const std::size_t n = layers_.front().rows();
  if (n == 0) throw Error(ErrorCode::ZeroDimension, "feature set has no samples");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].rows() != n) {
      throw Error(ErrorCode::DimensionMismatch, "layer " + std::to_string(l) + " has " +
                                                    std::to_string(layers_[l].rows()) + " rows, expected " +
                                                    std::to_string(n));
    }
    require_finite(layers_[l].data(), l);
  }
}

std::vector<std::size_t> FeatureSet::dims() const {
  std::vector<std::size_t> out;
  out.reserve(layers_.size());
  for (const auto& layer : layers_) out.push_back(layer.dim());
  return out;
}

FeatureSet FeatureSet::select_rows(std::span<const std::size_t> rows) const {
  std::vector<LayerBlock> out;
  out.reserve(layers_.size());
  for (const auto& layer : layers_) {
    FeatureMatrix m(static_cast<Eigen::Index>(rows.size()), layer.data().cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] >= layer.rows()) throw Error(ErrorCode::InvalidArgument, "row index out of range");
      m.row(static_cast<Eigen::Index>(i)) = layer.data().row(static_cast<Eigen::Index>(rows[i]));
    }
    out.emplace_back(std::move(m));
  }
  return FeatureSet(std::move(out));
}

FeatureSet FeatureSet::without_layer(std::size_t index) const {
  if (layers_.size() < 2 || index >= layers_.size()) {
    throw Error(ErrorCode::InvalidArgument, "cannot remove layer " + std::to_string(index));
  }
  std::vector<LayerBlock> out;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (l != index) out.push_back(layers_[l]);
  }
  return FeatureSet(std::move(out));
}

bool operator==(const FeatureSet& a, const FeatureSet& b) {
  if (a.layer_count() != b.layer_count() || a.sample_count() != b.sample_count()) return false;
  for (std::size_t l = 0; l < a.layer_count(); ++l) {
    const auto& x = a.layer(l).data();
    const auto& y = b.layer(l).data();
    if (x.cols() != y.cols()) return false;
    if (std::memcmp(x.data(), y.data(), sizeof(float) * static_cast<std::size_t>(x.size())) != 0) return false;
  }
  return true;
}

void require_same_layout(const FeatureSet& a, const FeatureSet& b, std::string_view context) {
  if (a.layer_count() != b.layer_count()) {
    throw Error(ErrorCode::LayerCountMismatch, std::string(context) + ": " + std::to_string(a.layer_count()) +
                                                   " vs " + std::to_string(b.layer_count()) + " layers");
  }
  for (std::size_t l = 0; l < a.layer_count(); ++l) {
    if (a.layer(l).dim() != b.layer(l).dim()) {
      throw Error(ErrorCode::DimensionMismatch, std::string(context) + ": layer " + std::to_string(l) +
                                                    " has dim " + std::to_string(b.layer(l).dim()) +
                                                    ", expected " + std::to_string(a.layer(l).dim()));
    }
  }
}

FeatureSet concat_rows(std::span<const FeatureSet> parts) {
  if (parts.empty()) throw Error(ErrorCode::EmptyInput, "nothing to concatenate");
  std::size_t total = 0;
  for (const auto& p : parts) {
    require_same_layout(parts.front(), p, "concat_rows");
    total += p.sample_count();
  }
  std::vector<LayerBlock> out;
  for (std::size_t l = 0; l < parts.front().layer_count(); ++l) {
    FeatureMatrix m(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(parts.front().layer(l).dim()));
    Eigen::Index row = 0;
    for (const auto& p : parts) {
      const auto& src = p.layer(l).data();
      m.middleRows(row, src.rows()) = src;
      row += src.rows();
    }
    out.emplace_back(std::move(m));
  }
  return FeatureSet(std::move(out));
}

std::vector<std::uint8_t> encode_features(const FeatureSet& set) {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  put_u32(out, static_cast<std::uint32_t>(set.layer_count()));
  put_u32(out, static_cast<std::uint32_t>(set.sample_count()));
  for (std::size_t l = 0; l < set.layer_count(); ++l) {
    const auto& m = set.layer(l).data();
    require_finite(m, l);
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    out.reserve(out.size() + 4 * static_cast<std::size_t>(m.size()));
    // RowMajor storage: data() is already in file order.
    for (Eigen::Index i = 0; i < m.size(); ++i) put_u32(out, std::bit_cast<std::uint32_t>(m.data()[i]));
  }
  return out;
}

FeatureSet decode_features(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::BadMagic, "not a UOFV1 feature file");
  }
  Reader in(bytes);
  in.skip(kMagic.size());
  const std::uint32_t layers = in.u32("header");
  const std::uint32_t samples = in.u32("header");
  if (layers == 0) throw Error(ErrorCode::ZeroDimension, "file declares zero layers");
  if (samples == 0) throw Error(ErrorCode::ZeroDimension, "file declares zero samples");
  std::vector<LayerBlock> blocks;
  blocks.reserve(layers);
  for (std::uint32_t l = 0; l < layers; ++l) {
    const std::uint32_t dim = in.u32("layer header");
    if (dim == 0) throw Error(ErrorCode::ZeroDimension, "layer " + std::to_string(l) + " declares zero columns");
    const std::size_t count = static_cast<std::size_t>(samples) * dim;
    if (in.remaining() / 4 < count) {
      throw Error(ErrorCode::Truncated, "layer " + std::to_string(l) + " needs " + std::to_string(count) +
                                            " values, file has " + std::to_string(in.remaining() / 4));
    }
    FeatureMatrix m(samples, dim);
    for (std::size_t i = 0; i < count; ++i) m.data()[i] = in.f32();
    blocks.emplace_back(std::move(m));
  }
  if (in.remaining() != 0) {
    throw Error(ErrorCode::Truncated, std::to_string(in.remaining()) + " trailing bytes after last layer");
  }
  return FeatureSet(std::move(blocks));
}

void save_features(const FeatureSet& set, const std::filesystem::path& path) {
  const auto bytes = encode_features(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

FeatureSet load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_features(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

}  // namespace uood
