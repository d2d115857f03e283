#pragma once

#include <Eigen/Dense>

#include <vector>

namespace qcs {

/// Finitely supported measure on S^{N-1}: atoms are columns of `points`.
struct AtomicMeasure {
  Eigen::MatrixXd points;   ///< N x m, unit columns
  Eigen::VectorXd weights;  ///< m nonnegative weights

  int size() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(points.rows()); }
  double total_mass() const { return weights.sum(); }

  /// Checks nonnegative weights, unit atoms and total mass 1 within tol.
  bool is_probability(double tol = 1e-12) const;

  /// Drops atoms with weight <= threshold.
  AtomicMeasure pruned(double threshold = 0.0) const;

  /// Applies an orthogonal map to every atom.
  AtomicMeasure rotated(const Eigen::MatrixXd& rotation) const;
};

}  // namespace qcs
