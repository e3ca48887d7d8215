#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "uood/feature_store.hpp"

namespace uood {

/// Affine soft invariants g_k(f) = a_k . f + b_k of one layer.
///
/// Column k of `directions` is a_k, a unit eigenvector of the biased sample
/// covariance; columns are ordered by ascending eigenvalue so the tightest
/// invariant comes first. errors[k] is the training mean squared value of
/// g_k, which equals the k-th eigenvalue, and offsets[k] = -a_k . mean.
struct InvariantBasis {
  Eigen::MatrixXd directions;
  Eigen::VectorXd offsets;
  Eigen::VectorXd errors;
  Eigen::VectorXd mean;

  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(mean.size()); }

  /// All g_k(f), evaluated as a_k . (f - mean).
  [[nodiscard]] Eigen::VectorXd evaluate(const Eigen::VectorXd& f) const;
};

enum class SweepDirection { FromMostInvariant, FromMostVariant };

/// Either an explicit number of components or a cumulative share of the
/// total variance in (0, 1], taken from one end of the spectrum.
struct ComponentSelection {
  SweepDirection direction = SweepDirection::FromMostInvariant;
  std::variant<std::size_t, double> amount = 1.0;

  static ComponentSelection all() { return {SweepDirection::FromMostInvariant, 1.0}; }
};

inline constexpr double kDefaultEpsilonFloor = 1e-12;

/// One basis per layer, K = D invariants each. Requires N >= 2.
std::vector<InvariantBasis> fit_invariants(const FeatureSet& train, unsigned threads = 1);

/// Indices into the basis columns selected by `sel`: a contiguous run from
/// the chosen end, never empty. For a variance share p the run is the
/// longest one whose cumulative share does not exceed p.
std::vector<std::size_t> resolve_components(const InvariantBasis& basis, const ComponentSelection& sel);

/// s^2(f) = sum_{k in sel} g_k(f)^2 / max(e_k, epsilon_floor * e_max).
/// Throws AllErrorsZero when a selected denominator is zero.
double invariant_score(const InvariantBasis& basis, const Eigen::VectorXd& f, const ComponentSelection& sel,
                       double epsilon_floor = kDefaultEpsilonFloor);

/// Same as invariant_score with a pre-resolved component set.
double invariant_score(const InvariantBasis& basis, const Eigen::VectorXd& f, const std::vector<std::size_t>& components,
                       double epsilon_floor = kDefaultEpsilonFloor);

/// Total score per sample: sum over layers of sqrt(invariant_score).
Eigen::VectorXd invariant_total_scores(const std::vector<InvariantBasis>& bases, const FeatureSet& test,
                                       const std::vector<std::vector<std::size_t>>& components,
                                       double epsilon_floor, unsigned threads = 1);

struct SweepRow {
  double fraction = 0.0;
  double auroc = 0.0;
  std::vector<std::size_t> components_per_layer;
};

/// AUROC of the partial-spectrum score at each variance share in `grid`
/// (ascending, within (0, 1]).
std::vector<SweepRow> component_sweep(const std::vector<InvariantBasis>& bases, const FeatureSet& test_in,
                                      const FeatureSet& test_out, SweepDirection direction,
                                      const std::vector<double>& grid,
                                      double epsilon_floor = kDefaultEpsilonFloor, unsigned threads = 1);

}  // namespace uood
