#pragma once

#include "qcs/quadrature.hpp"
#include "qcs/quaternion.hpp"
#include "qcs/sphere.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

namespace qcs {

/// Point (q, omega) of the quaternionic Heisenberg group H^n x Im H.
class GroupPoint {
 public:
  /// Throws DomainError unless Re(omega) == 0.
  GroupPoint(QVector q, Quaternion omega);

  const QVector& q() const { return q_; }
  Quaternion omega() const { return omega_; }
  int n() const { return q_.size(); }

 private:
  QVector q_;
  Quaternion omega_;
};

/// Distance below which cayley_inv refuses |1 + zeta_{n+1}|.
inline constexpr double kPoleTolerance = 1e-8;

/// C(q, omega) = (2q D^{-1}, (1 - |q|^2 - omega) D^{-1}), D = 1 + |q|^2 + omega.
SpherePoint cayley(const GroupPoint& g);

/// C^{-1}(zeta) = (zeta' (1+zeta_{n+1})^{-1}, Im[(1-zeta_{n+1})(1+zeta_{n+1})^{-1}]).
/// Throws PoleError near (0, ..., 0, -1).
GroupPoint cayley_inv(const SpherePoint& zeta);

/// delta_lambda(q, omega) = (lambda q, lambda^2 omega). Throws ValidationError for lambda <= 0.
GroupPoint dilate(double lambda, const GroupPoint& g);

/// Closed form of C o delta_lambda o C^{-1}; defined on the whole sphere.
Eigen::VectorXd gamma_north(double lambda, const Eigen::Ref<const Eigen::VectorXd>& zeta);

/// |J| of gamma_north at zeta: (2 lambda / |1 + zeta_{n+1} + lambda^2 (1 - zeta_{n+1})|)^Q.
double gamma_north_jacobian(double lambda, const Eigen::Ref<const Eigen::VectorXd>& zeta);

/// Element of Sp(n+1) acting on the right, zeta -> zeta M, stored as the
/// equivalent real orthogonal matrix on R^{4n+4}. Commutes with left
/// multiplication by quaternions, so it preserves <.,.> and the vertical fields.
class Rotation {
 public:
  Rotation() = default;
  explicit Rotation(Eigen::MatrixXd matrix) : m_(std::move(matrix)) {}
  static Rotation identity(int dim) { return Rotation(Eigen::MatrixXd::Identity(dim, dim)); }
  /// From a quaternionic (n+1)x(n+1) matrix M (row-major, M[m][l]).
  static Rotation from_quaternion_matrix(const std::vector<std::vector<Quaternion>>& m);

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const { return m_ * x; }
  Rotation inverse() const { return Rotation(m_.transpose()); }
  Rotation then(const Rotation& next) const { return Rotation(next.m_ * m_); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  Eigen::MatrixXd m_;
};

/// A_xi with A_xi(xi) = N: a phase fix on the last coordinate followed by a
/// quaternionic Householder reflection. Identity at xi = N.
Rotation rotation_to_north(const SpherePoint& xi);

/// Random element of the stabilizer of N (diag(B, 1) with B in Sp(n)),
/// deterministic in `seed`. Used to build alternative choices of A_xi.
Rotation north_stabilizer(int n, std::uint64_t seed);

/// Gamma_{lambda,xi} = A^{-1} o Gamma_{lambda,N} o A.
Eigen::VectorXd gamma(double lambda, const SpherePoint& xi,
                      const Eigen::Ref<const Eigen::VectorXd>& zeta);

/// Conformal automorphism: a rotation, a conjugated dilation, or a
/// composition (parts[0] o parts[1] o ... ; the last part acts first).
class Automorphism {
 public:
  struct RotationKind {
    Rotation rotation;
  };
  struct DilationKind {
    double lambda;
    Eigen::VectorXd xi;
    Rotation to_north;  ///< A_xi
  };
  struct CompositionKind {
    std::vector<Automorphism> parts;
  };

  static Automorphism identity(int n);
  static Automorphism rotation(Rotation r);
  /// Gamma_{lambda,xi} with the default A_xi.
  static Automorphism dilation(double lambda, const SpherePoint& xi);
  static Automorphism dilation(double lambda, const SpherePoint& xi, Rotation to_north);
  /// a o b.
  static Automorphism compose(const Automorphism& a, const Automorphism& b);

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& zeta) const;
  Automorphism inverse() const;
  /// |J| from the closed conformal factor (rotation: 1; dilation: the
  /// gamma_north factor at A zeta; composition: chain rule).
  double conformal_jacobian(const Eigen::Ref<const Eigen::VectorXd>& zeta) const;

  int dim() const;
  bool is_identity() const;

  nlohmann::json to_json() const;
  static Automorphism from_json(const nlohmann::json& j);

  const std::variant<RotationKind, DilationKind, CompositionKind>& kind() const { return kind_; }

 private:
  explicit Automorphism(std::variant<RotationKind, DilationKind, CompositionKind> k)
      : kind_(std::move(k)) {}
  std::variant<RotationKind, DilationKind, CompositionKind> kind_;
};

/// |J_Phi(zeta)| as the square root of the Gram determinant of the
/// finite-difference differential on an orthonormal tangent frame. Throws
/// DomainError when the differential is degenerate.
double jacobian(const Automorphism& phi, const Eigen::VectorXd& zeta, double h = kFdStep);

/// u^Phi(zeta) = |J_Phi(zeta)|^{1/r} u(Phi(zeta)).
SphereFunction pullback(SphereFunction u, Automorphism phi, double r);

/// Mixture of pushforwards of the uniform measure under Gamma_{lambda_m, xi_m}.
/// Component m has density |J_{Gamma_m^{-1}}| / area. A component with
/// lambda = 1 is the uniform distribution.
class PushforwardMixture {
 public:
  struct Component {
    double lambda;
    Eigen::VectorXd center;
    double mass;
  };

  explicit PushforwardMixture(std::vector<Component> components);

  /// Proposal density at a sphere point (w.r.t. surface measure).
  double density(const Eigen::Ref<const Eigen::VectorXd>& eta) const;
  SampleTransform transform() const;
  int dim() const { return dim_; }

 private:
  std::vector<Component> components_;
  std::vector<Automorphism> maps_;      ///< Gamma_{lambda_m, xi_m}
  std::vector<Automorphism> inverses_;  ///< Gamma_{1/lambda_m, xi_m}
  std::vector<double> cumulative_;
  int dim_ = 0;
  double area_ = 0.0;
};

}  // namespace qcs
