#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

namespace qcs {

/// Real quaternion a + b i + c j + d k.
struct Quaternion {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  static constexpr Quaternion one() { return {1.0, 0.0, 0.0, 0.0}; }
  static constexpr Quaternion i() { return {0.0, 1.0, 0.0, 0.0}; }
  static constexpr Quaternion j() { return {0.0, 0.0, 1.0, 0.0}; }
  static constexpr Quaternion k() { return {0.0, 0.0, 0.0, 1.0}; }

  constexpr double real() const { return a; }
  constexpr Quaternion imag() const { return {0.0, b, c, d}; }
  constexpr Quaternion conj() const { return {a, -b, -c, -d}; }
  constexpr double norm2() const { return a * a + b * b + c * c + d * d; }
  double norm() const { return std::sqrt(norm2()); }

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

constexpr Quaternion operator+(Quaternion p, Quaternion q) {
  return {p.a + q.a, p.b + q.b, p.c + q.c, p.d + q.d};
}
constexpr Quaternion operator-(Quaternion p, Quaternion q) {
  return {p.a - q.a, p.b - q.b, p.c - q.c, p.d - q.d};
}
constexpr Quaternion operator-(Quaternion q) { return {-q.a, -q.b, -q.c, -q.d}; }
constexpr Quaternion operator*(double s, Quaternion q) {
  return {s * q.a, s * q.b, s * q.c, s * q.d};
}
constexpr Quaternion operator*(Quaternion q, double s) { return s * q; }
constexpr Quaternion operator/(Quaternion q, double s) {
  return {q.a / s, q.b / s, q.c / s, q.d / s};
}

/// Hamilton product with ij = k, jk = i, ki = j.
constexpr Quaternion qmul(Quaternion p, Quaternion q) {
  return {p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
          p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
          p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
          p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a};
}
constexpr Quaternion operator*(Quaternion p, Quaternion q) { return qmul(p, q); }

/// Multiplicative inverse. Throws DomainError for the zero quaternion.
Quaternion qinv(Quaternion q);

/// Right division p * q^{-1}; the convention used by every fraction in the
/// Cayley and dilation formulas.
Quaternion right_div(Quaternion p, Quaternion q);

/// exp(t * u) for a unit imaginary quaternion u.
Quaternion exp_imag(double t, Quaternion u);

/// Element of H^m stored as 4m reals, quaternion l occupying [4l, 4l+4) in
/// (a, b, c, d) order.
class QVector {
 public:
  QVector() = default;
  explicit QVector(int length) : coords_(Eigen::VectorXd::Zero(4 * length)) {}
  explicit QVector(Eigen::VectorXd coords);

  static QVector from_quaternions(const std::vector<Quaternion>& entries);
  /// Inverse of to_complex: (z_1..z_m, w_1..w_m) with zeta_l = z_l + w_l j.
  static QVector from_complex(const std::vector<std::complex<double>>& zw);

  int size() const { return static_cast<int>(coords_.size() / 4); }
  Quaternion operator[](int l) const {
    return {coords_[4 * l], coords_[4 * l + 1], coords_[4 * l + 2], coords_[4 * l + 3]};
  }
  void set(int l, Quaternion q);

  const Eigen::VectorXd& coords() const { return coords_; }
  Eigen::VectorXd& coords() { return coords_; }

  std::vector<Quaternion> quaternions() const;
  /// Complex split z = a + b i, w = c + d i, returned as (z_1..z_m, w_1..w_m).
  std::vector<std::complex<double>> to_complex() const;

  /// Componentwise q * zeta_l.
  QVector left_mul(Quaternion q) const;
  /// Componentwise zeta_l * q.
  QVector right_mul(Quaternion q) const;

  double norm() const { return coords_.norm(); }

 private:
  Eigen::VectorXd coords_;
};

/// Quaternionic Hermitian product sum_l zeta_l * conj(eta_l).
/// Throws std::invalid_argument on length mismatch.
Quaternion hermitian(const QVector& zeta, const QVector& eta);

/// Same product on raw coordinate vectors of equal length 4m.
Quaternion hermitian(const Eigen::Ref<const Eigen::VectorXd>& zeta,
                     const Eigen::Ref<const Eigen::VectorXd>& eta);

/// Quaternion l of a coordinate vector.
inline Quaternion quat_at(const Eigen::Ref<const Eigen::VectorXd>& x, int l) {
  return {x[4 * l], x[4 * l + 1], x[4 * l + 2], x[4 * l + 3]};
}
inline void set_quat(Eigen::Ref<Eigen::VectorXd> x, int l, Quaternion q) {
  x[4 * l] = q.a;
  x[4 * l + 1] = q.b;
  x[4 * l + 2] = q.c;
  x[4 * l + 3] = q.d;
}

/// Componentwise left multiplication on a coordinate vector.
Eigen::VectorXd left_mul(Quaternion q, const Eigen::Ref<const Eigen::VectorXd>& x);

/// log Gamma(x) for x > 0; throws DomainError otherwise.
double log_gamma(double x);

}  // namespace qcs
