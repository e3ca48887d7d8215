#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "uood/feature_store.hpp"
#include "uood/shrinkage.hpp"

namespace uood {

/// Mean and biased (divisor N) covariance of one layer's descriptors.
struct LayerMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd centered;  ///< N x D, rows in canonical order
};

/// Rows are first put into lexicographic order, then summed sequentially,
/// so the result is bit-identical for any permutation of the input rows.
LayerMoments layer_moments(const LayerBlock& layer);

struct ShrinkResult {
  Eigen::MatrixXd covariance;
  double intensity = 0.0;
};

/// Ledoit-Wolf shrinkage toward the scaled identity m*I, m = trace(S)/D:
///
///   d2 = ||S - m I||_F^2 / D
///   b2 = min(d2, sum_k ||x_k x_k^T - S||_F^2 / (N^2 D))
///   delta = b2 / d2                (0 when d2 == 0)
///   result = (1 - delta) S + delta m I
///
/// `centered` holds the N mean-removed samples S was computed from.
/// Throws ZeroVariance when trace(S) == 0.
ShrinkResult ledoit_wolf_shrink(const Eigen::MatrixXd& raw_covariance, const Eigen::MatrixXd& centered);

struct LayerGaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  ///< after shrinkage
  Eigen::MatrixXd factor;      ///< lower triangular, factor * factor^T == covariance
  double shrinkage_intensity = 0.0;

  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
};

struct GaussianModel {
  std::vector<LayerGaussian> layers;
  Shrinkage shrinkage = Shrinkage::LedoitWolf;

  [[nodiscard]] std::size_t layer_count() const noexcept { return layers.size(); }
  [[nodiscard]] std::vector<std::size_t> dims() const;
};

/// Cholesky factor of an SPD matrix. With `allow_jitter`, a failed
/// factorization is retried with 1e-10 * trace/D added to the diagonal,
/// doubling up to three times. Throws SingularCovariance when the matrix is
/// not (numerically) positive definite. Any jitter that was needed is added
/// to `covariance` in place so the factor reconstructs it.
Eigen::MatrixXd cholesky_factor(Eigen::MatrixXd& covariance, bool allow_jitter);

/// Per-layer Gaussian fit; layers are fitted concurrently on up to
/// `threads` workers. Requires N >= 2.
GaussianModel fit_gaussian(const FeatureSet& train, Shrinkage shrinkage, unsigned threads = 1);

/// ".uom" model file: "UOMV" 0x01, u32 header length, JSON header
/// {"layers", "dims", "shrinkage", "intensity"}, then per layer the mean (D)
/// and the full row-major Cholesky factor (D*D) as little-endian float64.
void save_model(const GaussianModel& model, const std::filesystem::path& path);
GaussianModel load_model(const std::filesystem::path& path);

}  // namespace uood
