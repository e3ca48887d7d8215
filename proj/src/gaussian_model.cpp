#include "uood/gaussian_model.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Cholesky>
#include <json.hpp>

#include "uood/error.hpp"
#include "uood/parallel.hpp"

namespace uood {

namespace {

std::vector<std::size_t> canonical_row_order(const FeatureMatrix& data) {
  std::vector<std::size_t> order(static_cast<std::size_t>(data.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto cols = data.cols();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const float* ra = data.data() + static_cast<Eigen::Index>(a) * cols;
    const float* rb = data.data() + static_cast<Eigen::Index>(b) * cols;
    return std::lexicographical_compare(ra, ra + cols, rb, rb + cols);
  });
  return order;
}

// Reject factorizations whose reciprocal condition estimate is at the level
// of rounding noise; LLT alone accepts tiny positive pivots produced by
// cancellation on rank-deficient input.
bool well_conditioned(const Eigen::LLT<Eigen::MatrixXd>& llt, Eigen::Index dim) {
  if (llt.info() != Eigen::Success) return false;
  const double threshold = std::numeric_limits<double>::epsilon() * static_cast<double>(dim);
  return llt.rcond() > threshold;
}

}  // namespace

std::vector<std::size_t> GaussianModel::dims() const {
  std::vector<std::size_t> out;
  for (const auto& layer : layers) out.push_back(layer.dim());
  return out;
}

LayerMoments layer_moments(const LayerBlock& layer) {
  const auto& data = layer.data();
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  const auto order = canonical_row_order(data);

  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = data.row(static_cast<Eigen::Index>(order[static_cast<std::size_t>(i)])).cast<double>();
  }

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < n; ++i) sum += x.row(i).transpose();
  LayerMoments m;
  m.mean = sum / static_cast<double>(n);
  m.centered = x.rowwise() - m.mean.transpose();
  Eigen::MatrixXd gram = m.centered.transpose() * m.centered;
  m.covariance = (0.5 * (gram + gram.transpose())) / static_cast<double>(n);
  return m;
}

ShrinkResult ledoit_wolf_shrink(const Eigen::MatrixXd& raw_covariance, const Eigen::MatrixXd& centered) {
  const Eigen::Index d = raw_covariance.rows();
  const Eigen::Index n = centered.rows();
  if (raw_covariance.cols() != d || centered.cols() != d) {
    throw Error(ErrorCode::DimensionMismatch, "covariance and samples disagree on dimension");
  }
  if (n == 0) throw Error(ErrorCode::TooFewSamples, "no samples for shrinkage");
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n);

  const double scale = raw_covariance.trace() / dd;
  if (!(scale > 0.0)) throw Error(ErrorCode::ZeroVariance, "all training samples are identical");

  const double s_norm2 = raw_covariance.squaredNorm();
  // ||S - mI||^2 = ||S||^2 - 2 m tr(S) + D m^2 = ||S||^2 - D m^2
  const double dispersion = std::max(0.0, s_norm2 - dd * scale * scale) / dd;

  // sum_k ||x_k x_k^T - S||^2 = sum_k ||x_k||^4 - N ||S||^2
  double fourth = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double r = centered.row(k).squaredNorm();
    fourth += r * r;
  }
  const double sampling = std::max(0.0, fourth / nn - s_norm2) / (nn * dd);

  const double intensity = dispersion > 0.0 ? std::min(sampling, dispersion) / dispersion : 0.0;

  ShrinkResult out;
  out.intensity = intensity;
  out.covariance = (1.0 - intensity) * raw_covariance;
  out.covariance.diagonal().array() += intensity * scale;
  return out;
}

Eigen::MatrixXd cholesky_factor(Eigen::MatrixXd& covariance, bool allow_jitter) {
  const Eigen::Index d = covariance.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (well_conditioned(llt, d)) return llt.matrixL();
  if (allow_jitter) {
    double jitter = 1e-10 * covariance.trace() / static_cast<double>(d);
    for (int attempt = 0; attempt <= 3 && jitter > 0.0; ++attempt, jitter *= 2.0) {
      Eigen::MatrixXd repaired = covariance;
      repaired.diagonal().array() += jitter;
      llt.compute(repaired);
      if (well_conditioned(llt, d)) {
        covariance = std::move(repaired);
        return llt.matrixL();
      }
    }
  }
  throw Error(ErrorCode::SingularCovariance,
              "covariance of dimension " + std::to_string(d) + " is not positive definite");
}

GaussianModel fit_gaussian(const FeatureSet& train, Shrinkage shrinkage, unsigned threads) {
  if (train.sample_count() < 2) {
    throw Error(ErrorCode::TooFewSamples, "need at least 2 training samples, got " +
                                              std::to_string(train.sample_count()));
  }
  GaussianModel model;
  model.shrinkage = shrinkage;
  model.layers.resize(train.layer_count());
  parallel_for(train.layer_count(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t l = begin; l < end; ++l) {
      LayerMoments moments = layer_moments(train.layer(l));
      LayerGaussian& g = model.layers[l];
      g.mean = std::move(moments.mean);
      if (shrinkage == Shrinkage::LedoitWolf) {
        ShrinkResult shrunk = ledoit_wolf_shrink(moments.covariance, moments.centered);
        g.covariance = std::move(shrunk.covariance);
        g.shrinkage_intensity = shrunk.intensity;
      } else {
        g.covariance = std::move(moments.covariance);
      }
      try {
        g.factor = cholesky_factor(g.covariance, shrinkage == Shrinkage::LedoitWolf);
      } catch (const Error& e) {
        throw Error(e.code(), "layer " + std::to_string(l) + ": " + e.detail());
      }
    }
  });
  return model;
}

// ---- model file ----------------------------------------------------------

namespace {

constexpr std::array<std::uint8_t, 5> kModelMagic{'U', 'O', 'M', 'V', 0x01};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int shift = 0; shift < 64; shift += 8) out.push_back(static_cast<std::uint8_t>(bits >> shift));
}

std::uint64_t get_le(const std::vector<std::uint8_t>& in, std::size_t& pos, int bytes) {
  if (in.size() - pos < static_cast<std::size_t>(bytes)) throw Error(ErrorCode::Truncated, "model file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[pos + static_cast<std::size_t>(i)]) << (8 * i);
  pos += static_cast<std::size_t>(bytes);
  return v;
}

}  // namespace

void save_model(const GaussianModel& model, const std::filesystem::path& path) {
  nlohmann::json header;
  header["layers"] = model.layer_count();
  header["dims"] = model.dims();
  header["shrinkage"] = std::string(to_string(model.shrinkage));
  std::vector<double> intensity;
  for (const auto& g : model.layers) intensity.push_back(g.shrinkage_intensity);
  header["intensity"] = intensity;
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(kModelMagic.begin(), kModelMagic.end());
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& g : model.layers) {
    for (Eigen::Index i = 0; i < g.mean.size(); ++i) put_f64(out, g.mean[i]);
    for (Eigen::Index r = 0; r < g.factor.rows(); ++r) {
      for (Eigen::Index c = 0; c < g.factor.cols(); ++c) put_f64(out, g.factor(r, c));
    }
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

GaussianModel load_model(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::Io, "cannot open " + path.string());
  const std::vector<std::uint8_t> in((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  if (in.size() < kModelMagic.size() || !std::equal(kModelMagic.begin(), kModelMagic.end(), in.begin())) {
    throw Error(ErrorCode::BadMagic, path.string() + ": not a model file");
  }
  std::size_t pos = kModelMagic.size();
  const auto header_len = static_cast<std::size_t>(get_le(in, pos, 4));
  if (in.size() - pos < header_len) throw Error(ErrorCode::Truncated, path.string() + ": header truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in.begin() + static_cast<std::ptrdiff_t>(pos),
                                   in.begin() + static_cast<std::ptrdiff_t>(pos + header_len));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadModel, path.string() + ": " + e.what());
  }
  pos += header_len;

  GaussianModel model;
  std::vector<std::size_t> dims;
  std::vector<double> intensity;
  try {
    model.shrinkage = parse_shrinkage(header.at("shrinkage").get<std::string>());
    dims = header.at("dims").get<std::vector<std::size_t>>();
    intensity = header.at("intensity").get<std::vector<double>>();
    if (header.at("layers").get<std::size_t>() != dims.size() || dims.size() != intensity.size() || dims.empty()) {
      throw Error(ErrorCode::BadModel, "inconsistent layer count");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadModel, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::BadModel, path.string() + ": " + e.detail());
  }

  for (std::size_t l = 0; l < dims.size(); ++l) {
    const auto d = static_cast<Eigen::Index>(dims[l]);
    if (d == 0) throw Error(ErrorCode::ZeroDimension, path.string() + ": zero-dimensional layer");
    LayerGaussian g;
    g.shrinkage_intensity = intensity[l];
    g.mean.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) g.mean[i] = std::bit_cast<double>(get_le(in, pos, 8));
    g.factor.resize(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) g.factor(r, c) = std::bit_cast<double>(get_le(in, pos, 8));
    }
    if (!g.mean.allFinite() || !g.factor.allFinite()) {
      throw Error(ErrorCode::NonFiniteValue, path.string() + ": non-finite model parameters");
    }
    g.covariance = g.factor * g.factor.transpose();
    model.layers.push_back(std::move(g));
  }
  if (pos != in.size()) throw Error(ErrorCode::BadModel, path.string() + ": trailing bytes");
  return model;
}

}  // namespace uood
