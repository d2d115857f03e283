#include "qcs/quaternion.hpp"

#include "qcs/errors.hpp"

#include <stdexcept>

namespace qcs {

Quaternion qinv(Quaternion q) {
  const double n2 = q.norm2();
  if (n2 == 0.0) throw DomainError("qinv: zero quaternion has no inverse");
  return q.conj() / n2;
}

Quaternion right_div(Quaternion p, Quaternion q) { return p * qinv(q); }

Quaternion exp_imag(double t, Quaternion u) {
  return Quaternion::one() * std::cos(t) + u * std::sin(t);
}

QVector::QVector(Eigen::VectorXd coords) : coords_(std::move(coords)) {
  if (coords_.size() % 4 != 0)
    throw std::invalid_argument("QVector: coordinate count must be a multiple of 4");
}

QVector QVector::from_quaternions(const std::vector<Quaternion>& entries) {
  QVector v(static_cast<int>(entries.size()));
  for (int l = 0; l < v.size(); ++l) v.set(l, entries[l]);
  return v;
}

QVector QVector::from_complex(const std::vector<std::complex<double>>& zw) {
  if (zw.size() % 2 != 0)
    throw std::invalid_argument("QVector::from_complex: expected (z, w) halves");
  const int m = static_cast<int>(zw.size() / 2);
  QVector v(m);
  for (int l = 0; l < m; ++l)
    v.set(l, {zw[l].real(), zw[l].imag(), zw[m + l].real(), zw[m + l].imag()});
  return v;
}

void QVector::set(int l, Quaternion q) { set_quat(coords_, l, q); }

std::vector<Quaternion> QVector::quaternions() const {
  std::vector<Quaternion> out(size());
  for (int l = 0; l < size(); ++l) out[l] = (*this)[l];
  return out;
}

std::vector<std::complex<double>> QVector::to_complex() const {
  const int m = size();
  std::vector<std::complex<double>> zw(2 * m);
  for (int l = 0; l < m; ++l) {
    const Quaternion q = (*this)[l];
    zw[l] = {q.a, q.b};
    zw[m + l] = {q.c, q.d};
  }
  return zw;
}

QVector QVector::left_mul(Quaternion q) const { return QVector(qcs::left_mul(q, coords_)); }

QVector QVector::right_mul(Quaternion q) const {
  QVector out(size());
  for (int l = 0; l < size(); ++l) out.set(l, (*this)[l] * q);
  return out;
}

Quaternion hermitian(const Eigen::Ref<const Eigen::VectorXd>& zeta,
                     const Eigen::Ref<const Eigen::VectorXd>& eta) {
  if (zeta.size() != eta.size() || zeta.size() % 4 != 0)
    throw std::invalid_argument("hermitian: length mismatch");
  Quaternion acc;
  for (Eigen::Index l = 0; l < zeta.size() / 4; ++l)
    acc = acc + quat_at(zeta, static_cast<int>(l)) * quat_at(eta, static_cast<int>(l)).conj();
  return acc;
}

Quaternion hermitian(const QVector& zeta, const QVector& eta) {
  return hermitian(zeta.coords(), eta.coords());
}

Eigen::VectorXd left_mul(Quaternion q, const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index l = 0; l < x.size() / 4; ++l)
    set_quat(out, static_cast<int>(l), q * quat_at(x, static_cast<int>(l)));
  return out;
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  return std::lgamma(x);
}

}  // namespace qcs
