#include "uood/invariant_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "uood/auroc.hpp"
#include "uood/error.hpp"
#include "uood/gaussian_model.hpp"
#include "uood/parallel.hpp"

namespace uood {

Eigen::VectorXd InvariantBasis::evaluate(const Eigen::VectorXd& f) const {
  if (f.size() != mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "vector of length " + std::to_string(f.size()) +
                                                  " against basis of dim " + std::to_string(mean.size()));
  }
  const Eigen::VectorXd centered = f - mean;
  Eigen::VectorXd g(directions.cols());
  for (Eigen::Index k = 0; k < directions.cols(); ++k) g[k] = directions.col(k).dot(centered);
  return g;
}

std::vector<InvariantBasis> fit_invariants(const FeatureSet& train, unsigned threads) {
  if (train.sample_count() < 2) {
    throw Error(ErrorCode::TooFewSamples, "need at least 2 training samples, got " +
                                              std::to_string(train.sample_count()));
  }
  std::vector<InvariantBasis> bases(train.layer_count());
  parallel_for(train.layer_count(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t l = begin; l < end; ++l) {
      const LayerMoments moments = layer_moments(train.layer(l));
      // Eigen returns eigenvalues in ascending order: most invariant first.
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(moments.covariance);
      if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::InvalidArgument, "eigendecomposition failed for layer " + std::to_string(l));
      }
      InvariantBasis& b = bases[l];
      b.mean = moments.mean;
      b.directions = solver.eigenvectors();
      b.errors = solver.eigenvalues().cwiseMax(0.0);
      b.offsets.resize(b.directions.cols());
      for (Eigen::Index k = 0; k < b.directions.cols(); ++k) b.offsets[k] = -b.directions.col(k).dot(b.mean);
    }
  });
  return bases;
}

std::vector<std::size_t> resolve_components(const InvariantBasis& basis, const ComponentSelection& sel) {
  const std::size_t d = basis.dim();
  std::size_t count = 0;
  if (const auto* explicit_count = std::get_if<std::size_t>(&sel.amount)) {
    if (*explicit_count == 0 || *explicit_count > d) {
      throw Error(ErrorCode::InvalidArgument, "component count " + std::to_string(*explicit_count) +
                                                  " outside [1, " + std::to_string(d) + "]");
    }
    count = *explicit_count;
  } else {
    const double share = std::get<double>(sel.amount);
    if (!(share > 0.0 && share <= 1.0)) {
      throw Error(ErrorCode::InvalidRange, "variance share must lie in (0, 1], got " + std::to_string(share));
    }
    const double total = basis.errors.sum();
    if (share >= 1.0 || !(total > 0.0)) {
      count = d;
    } else {
      const double budget = share * total * (1.0 + 1e-12);
      double cumulative = 0.0;
      for (std::size_t step = 0; step < d; ++step) {
        const std::size_t k = sel.direction == SweepDirection::FromMostInvariant ? step : d - 1 - step;
        cumulative += basis.errors[static_cast<Eigen::Index>(k)];
        if (cumulative > budget) break;
        count = step + 1;
      }
      count = std::max<std::size_t>(count, 1);
    }
  }
  std::vector<std::size_t> out(count);
  for (std::size_t step = 0; step < count; ++step) {
    out[step] = sel.direction == SweepDirection::FromMostInvariant ? step : d - 1 - step;
  }
  return out;
}

double invariant_score(const InvariantBasis& basis, const Eigen::VectorXd& f, const std::vector<std::size_t>& components,
                       double epsilon_floor) {
  if (f.size() != basis.mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "vector of length " + std::to_string(f.size()) +
                                                  " against basis of dim " + std::to_string(basis.mean.size()));
  }
  if (!(epsilon_floor >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon floor must be >= 0");
  const double floor = epsilon_floor * basis.errors.maxCoeff();
  const Eigen::VectorXd centered = f - basis.mean;
  double sum = 0.0;
  for (std::size_t k : components) {
    const auto col = static_cast<Eigen::Index>(k);
    const double denom = std::max(basis.errors[col], floor);
    if (!(denom > 0.0)) {
      throw Error(ErrorCode::AllErrorsZero, "component " + std::to_string(k) + " has zero training error");
    }
    const double g = basis.directions.col(col).dot(centered);
    sum += g * g / denom;
  }
  return sum;
}

double invariant_score(const InvariantBasis& basis, const Eigen::VectorXd& f, const ComponentSelection& sel,
                       double epsilon_floor) {
  return invariant_score(basis, f, resolve_components(basis, sel), epsilon_floor);
}

Eigen::VectorXd invariant_total_scores(const std::vector<InvariantBasis>& bases, const FeatureSet& test,
                                       const std::vector<std::vector<std::size_t>>& components,
                                       double epsilon_floor, unsigned threads) {
  if (test.layer_count() != bases.size() || components.size() != bases.size()) {
    throw Error(ErrorCode::LayerCountMismatch, "test set has " + std::to_string(test.layer_count()) +
                                                   " layers, basis has " + std::to_string(bases.size()));
  }
  std::vector<Eigen::MatrixXd> data;
  data.reserve(bases.size());
  for (std::size_t l = 0; l < bases.size(); ++l) {
    if (test.layer(l).dim() != bases[l].dim()) {
      throw Error(ErrorCode::DimensionMismatch, "layer " + std::to_string(l) + " dimension differs from basis");
    }
    data.push_back(test.layer(l).as_double());
  }
  Eigen::VectorXd total(static_cast<Eigen::Index>(test.sample_count()));
  parallel_for(test.sample_count(), threads, [&](std::size_t begin, std::size_t end) {
    for (auto i = static_cast<Eigen::Index>(begin); i < static_cast<Eigen::Index>(end); ++i) {
      double sum = 0.0;
      for (std::size_t l = 0; l < bases.size(); ++l) {
        const Eigen::VectorXd f = data[l].row(i).transpose();
        sum += std::sqrt(invariant_score(bases[l], f, components[l], epsilon_floor));
      }
      total[i] = sum;
    }
  });
  return total;
}

std::vector<SweepRow> component_sweep(const std::vector<InvariantBasis>& bases, const FeatureSet& test_in,
                                      const FeatureSet& test_out, SweepDirection direction,
                                      const std::vector<double>& grid, double epsilon_floor, unsigned threads) {
  if (grid.empty()) throw Error(ErrorCode::EmptyInput, "sweep grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] <= 1.0)) {
      throw Error(ErrorCode::InvalidRange, "grid value " + std::to_string(grid[i]) + " outside (0, 1]");
    }
    if (i > 0 && grid[i] < grid[i - 1]) throw Error(ErrorCode::InvalidRange, "grid must be ascending");
  }
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double fraction : grid) {
    std::vector<std::vector<std::size_t>> components;
    SweepRow row;
    row.fraction = fraction;
    for (const auto& basis : bases) {
      components.push_back(resolve_components(basis, {direction, fraction}));
      row.components_per_layer.push_back(components.back().size());
    }
    const Eigen::VectorXd in = invariant_total_scores(bases, test_in, components, epsilon_floor, threads);
    const Eigen::VectorXd out = invariant_total_scores(bases, test_out, components, epsilon_floor, threads);
    row.auroc = auroc(in, out);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace uood
