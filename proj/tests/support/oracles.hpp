#pragma once

// Test-only reference implementations. None of these call into the library
// code paths they are used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "uood/feature_store.hpp"

namespace uood::testing {

using Rows = std::vector<std::vector<double>>;

inline Rows to_rows(const LayerBlock& layer) {
  Rows rows(layer.rows(), std::vector<double>(layer.dim()));
  for (std::size_t i = 0; i < layer.rows(); ++i) {
    for (std::size_t j = 0; j < layer.dim(); ++j) {
      rows[i][j] = layer.data()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return rows;
}

/// Two-pass biased covariance with plain loops.
inline Eigen::MatrixXd textbook_covariance(const Rows& rows, std::vector<double>* mean_out = nullptr) {
  const std::size_t n = rows.size();
  const std::size_t d = rows.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      double s = 0.0;
      for (const auto& r : rows) s += (r[a] - mean[a]) * (r[b] - mean[b]);
      cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s / static_cast<double>(n);
    }
  }
  if (mean_out) *mean_out = mean;
  return cov;
}

/// Ledoit-Wolf intensity from the per-sample definition
/// sum_k ||x_k x_k^T - S||_F^2, without the fourth-moment shortcut.
inline double textbook_ledoit_wolf_intensity(const Rows& rows) {
  std::vector<double> mean;
  const Eigen::MatrixXd s = textbook_covariance(rows, &mean);
  const auto d = s.rows();
  const double n = static_cast<double>(rows.size());
  const double m = s.trace() / static_cast<double>(d);
  double d2 = 0.0;
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      const double v = s(a, b) - (a == b ? m : 0.0);
      d2 += v * v;
    }
  }
  d2 /= static_cast<double>(d);
  double bbar = 0.0;
  for (const auto& r : rows) {
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        const double v = (r[a] - mean[a]) * (r[b] - mean[b]) - s(a, b);
        bbar += v * v;
      }
    }
  }
  bbar /= n * n * static_cast<double>(d);
  return d2 > 0.0 ? std::min(bbar, d2) / d2 : 0.0;
}

/// Cyclic Jacobi rotations; returns eigenvalues in ascending order.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, int max_sweeps = 100) {
  const auto n = a.rows();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Gauss-Jordan elimination with partial pivoting.
inline Eigen::MatrixXd gauss_jordan_inverse(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  Eigen::MatrixXd a(n, 2 * n);
  a << m, Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    a.row(col).swap(a.row(pivot));
    a.row(col) /= a(col, col);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r != col) a.row(r) -= a(r, col) * a.row(col);
    }
  }
  return a.rightCols(n);
}

/// 2 * #(out > in) + #(out == in) over all pairs.
inline std::int64_t pairwise_twice_u(const std::vector<double>& in, const std::vector<double>& out) {
  std::int64_t total = 0;
  for (double o : out) {
    for (double i : in) total += o > i ? 2 : (o == i ? 1 : 0);
  }
  return total;
}

inline Eigen::MatrixXd random_gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

/// N samples from N(mean, A A^T) with random A, stored as float32.
inline FeatureMatrix correlated_block(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d, double scale = 1.0) {
  const Eigen::MatrixXd mix = random_gaussian(rng, d, d) + 2.0 * Eigen::MatrixXd::Identity(d, d);
  const Eigen::VectorXd mean = random_gaussian(rng, d, 1) * 3.0;
  Eigen::MatrixXd x = (random_gaussian(rng, n, d) * mix.transpose() * scale).rowwise() + mean.transpose();
  return x.cast<float>();
}

inline FeatureSet correlated_set(std::mt19937_64& rng, Eigen::Index n, const std::vector<Eigen::Index>& dims) {
  std::vector<LayerBlock> layers;
  for (auto d : dims) layers.emplace_back(correlated_block(rng, n, d));
  return FeatureSet(std::move(layers));
}

inline FeatureSet single(FeatureMatrix m) {
  std::vector<LayerBlock> layers;
  layers.emplace_back(std::move(m));
  return FeatureSet(std::move(layers));
}

inline FeatureSet from_double(const Eigen::MatrixXd& m) { return single(m.cast<float>()); }

/// Removes itself on destruction.
class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("uood_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
  [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace uood::testing
