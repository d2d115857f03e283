#include "qcs/measure.hpp"

#include <cmath>

namespace qcs {

bool AtomicMeasure::is_probability(double tol) const {
  if (points.cols() != weights.size()) return false;
  for (int i = 0; i < size(); ++i) {
    if (weights[i] < 0.0) return false;
    if (std::abs(points.col(i).norm() - 1.0) > tol) return false;
  }
  return std::abs(total_mass() - 1.0) <= tol;
}

AtomicMeasure AtomicMeasure::pruned(double threshold) const {
  int keep = 0;
  for (int i = 0; i < size(); ++i) keep += weights[i] > threshold ? 1 : 0;
  AtomicMeasure out{Eigen::MatrixXd(dim(), keep), Eigen::VectorXd(keep)};
  for (int i = 0, o = 0; i < size(); ++i) {
    if (weights[i] <= threshold) continue;
    out.points.col(o) = points.col(i);
    out.weights[o++] = weights[i];
  }
  return out;
}

AtomicMeasure AtomicMeasure::rotated(const Eigen::MatrixXd& rotation) const {
  return {rotation * points, weights};
}

}  // namespace qcs
