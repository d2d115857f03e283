#pragma once

#include "qcs/polynomial.hpp"
#include "qcs/quadrature.hpp"
#include "qcs/quaternion.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>

namespace qcs {

/// Central finite-difference step for first derivatives.
inline constexpr double kFdStep = 1e-5;
/// Step for second differences (spherical Laplacian).
inline constexpr double kFdStep2 = 1e-4;

/// Unit vector of H^{n+1} = R^{4n+4}.
class SpherePoint {
 public:
  /// Throws DomainError unless |<v,v> - 1| <= 1e-12.
  explicit SpherePoint(QVector v);
  explicit SpherePoint(Eigen::VectorXd coords) : SpherePoint(QVector(std::move(coords))) {}
  static SpherePoint normalized(QVector v);
  static SpherePoint normalized(Eigen::VectorXd coords) { return normalized(QVector(std::move(coords))); }
  /// N = (0, ..., 0, 1) on S^{4n+3}.
  static SpherePoint north(int n);

  const QVector& q() const { return v_; }
  const Eigen::VectorXd& x() const { return v_.coords(); }
  int n() const { return v_.size() - 1; }
  int dim() const { return static_cast<int>(v_.coords().size()); }

 private:
  struct Unchecked {};
  SpherePoint(QVector v, Unchecked) : v_(std::move(v)) {}
  QVector v_;
};

/// Function on the sphere, evaluated on ambient coordinates. Callers pass
/// points of unit norm unless stated otherwise.
using SphereFunction = std::function<double(const Eigen::VectorXd&)>;

/// Evaluates f at x / |x|; gives the 0-homogeneous extension used by the
/// finite-difference operators.
SphereFunction homogeneous_extension(SphereFunction f);

enum class Axis { i, j, k };
Quaternion axis_unit(Axis axis);

/// (T_i, T_j, T_k)(zeta) = (-i zeta, -j zeta, -k zeta).
std::array<Eigen::VectorXd, 3> vertical_fields(const Eigen::Ref<const Eigen::VectorXd>& zeta);

/// Euclidean gradient of f in R^D by central differences.
Eigen::VectorXd ambient_gradient(const SphereFunction& f, const Eigen::VectorXd& x,
                                 double h = kFdStep);

/// T_axis f via the explicit coordinate sums (e.g. sum b df/da - a df/db +
/// d df/dc - c df/dd for axis i) with finite-difference partials.
double vertical_derivative(const SphereFunction& f, const Eigen::VectorXd& zeta, Axis axis,
                           double h = kFdStep);

/// d/dt f(exp(-t u) zeta) at t = 0 by central differences of the flow.
double vertical_flow_derivative(const SphereFunction& f, const Eigen::VectorXd& zeta, Axis axis,
                                double h = kFdStep);

/// Ambient gradient projected onto T_zeta S.
Eigen::VectorXd tangential_gradient(const SphereFunction& f, const Eigen::VectorXd& zeta,
                                    double h = kFdStep);

/// Tangential gradient with its T_i, T_j, T_k components removed; lies in
/// H_zeta = {v : <zeta, v> = 0}.
Eigen::VectorXd horizontal_gradient(const SphereFunction& f, const Eigen::VectorXd& zeta,
                                    double h = kFdStep);

/// Same projection applied to an already-computed ambient gradient.
Eigen::VectorXd project_horizontal(const Eigen::VectorXd& ambient_grad,
                                   const Eigen::Ref<const Eigen::VectorXd>& zeta);

/// Pointwise orthonormal frame of T_zeta S^{4n+3}.
struct TangentFrame {
  Eigen::VectorXd base;
  std::array<Eigen::VectorXd, 3> vertical;
  Eigen::MatrixXd horizontal;  ///< D x 4n, columns span H_zeta

  /// All 4n+3 frame vectors as columns (vertical first).
  Eigen::MatrixXd all() const;
};

TangentFrame tangent_frame(const Eigen::VectorXd& zeta);

/// Orthonormal basis (D x (D-1)) of the tangent space of S^{D-1} at x; works
/// in any dimension.
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& x);

/// Laplace-Beltrami of f on S^{D-1} at x, from second differences of the
/// 0-homogeneous extension.
double spherical_laplacian(const SphereFunction& f, const Eigen::VectorXd& x,
                           double h = kFdStep2);

struct EigenCheck {
  double eigenvalue = 0.0;   ///< Rayleigh quotient  sum h Lap h / sum h^2
  double expected = 0.0;     ///< -k (k + d - 1)
  double max_pointwise = 0.0;  ///< max |Lap h - expected h| / max|h|
  int points = 0;
};

/// Rayleigh quotient of the spherical Laplacian for a harmonic homogeneous
/// polynomial on S^d (h has d+1 variables). Throws ValidationError if h is not
/// homogeneous or not harmonic.
EigenCheck laplacian_eigen_check(const RealPolynomial& h, const QuadratureSpec& points);

}  // namespace qcs
