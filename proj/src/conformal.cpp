#include "qcs/conformal.hpp"

#include "qcs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace qcs {

GroupPoint::GroupPoint(QVector q, Quaternion omega) : q_(std::move(q)), omega_(omega) {
  if (omega_.a != 0.0) throw DomainError("GroupPoint: omega must be purely imaginary");
}

SpherePoint cayley(const GroupPoint& g) {
  const int n = g.n();
  const double q2 = g.q().coords().squaredNorm();
  const Quaternion den = Quaternion{1.0 + q2, 0.0, 0.0, 0.0} + g.omega();
  const Quaternion inv = qinv(den);
  QVector out(n + 1);
  for (int l = 0; l < n; ++l) out.set(l, 2.0 * g.q()[l] * inv);
  out.set(n, (Quaternion{1.0 - q2, 0.0, 0.0, 0.0} - g.omega()) * inv);
  return SpherePoint::normalized(std::move(out));
}

GroupPoint cayley_inv(const SpherePoint& zeta) {
  const int n = zeta.n();
  const Quaternion t = zeta.q()[n];
  const Quaternion s = Quaternion::one() + t;
  const double dist = s.norm();
  if (dist <= kPoleTolerance)
    throw PoleError("cayley_inv: point within " + std::to_string(dist) + " of the pole", dist);
  const Quaternion inv = qinv(s);
  QVector q(n);
  for (int l = 0; l < n; ++l) q.set(l, zeta.q()[l] * inv);
  return GroupPoint(std::move(q), ((Quaternion::one() - t) * inv).imag());
}

GroupPoint dilate(double lambda, const GroupPoint& g) {
  if (!(lambda > 0.0)) throw ValidationError("dilate: lambda must be positive");
  QVector q = g.q();
  q.coords() *= lambda;
  return GroupPoint(std::move(q), lambda * lambda * g.omega());
}

namespace {

Quaternion gamma_denominator(double lambda, Quaternion t) {
  const double l2 = lambda * lambda;
  return Quaternion::one() + t + l2 * (Quaternion::one() - t);
}

void check_lambda(double lambda, const char* who) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ValidationError(std::string(who) + ": lambda must be positive and finite");
}

}  // namespace

Eigen::VectorXd gamma_north(double lambda, const Eigen::Ref<const Eigen::VectorXd>& zeta) {
  check_lambda(lambda, "gamma_north");
  const int last = static_cast<int>(zeta.size() / 4) - 1;
  const Quaternion t = quat_at(zeta, last);
  const Quaternion inv = qinv(gamma_denominator(lambda, t));
  const double l2 = lambda * lambda;
  Eigen::VectorXd out(zeta.size());
  for (int l = 0; l < last; ++l) set_quat(out, l, 2.0 * lambda * quat_at(zeta, l) * inv);
  set_quat(out, last, (Quaternion::one() + t - l2 * (Quaternion::one() - t)) * inv);
  return out;
}

double gamma_north_jacobian(double lambda, const Eigen::Ref<const Eigen::VectorXd>& zeta) {
  check_lambda(lambda, "gamma_north_jacobian");
  const int last = static_cast<int>(zeta.size() / 4) - 1;
  const double stretch = 2.0 * lambda / gamma_denominator(lambda, quat_at(zeta, last)).norm();
  // Horizontal directions scale by the stretch, vertical ones by its square.
  return std::pow(stretch, 4 * last + 6);
}

Rotation Rotation::from_quaternion_matrix(const std::vector<std::vector<Quaternion>>& m) {
  const int len = static_cast<int>(m.size());
  const int dim = 4 * len;
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(dim, dim);
  const Quaternion units[4] = {Quaternion::one(), Quaternion::i(), Quaternion::j(),
                               Quaternion::k()};
  for (int row = 0; row < len; ++row) {
    if (static_cast<int>(m[row].size()) != len)
      throw std::invalid_argument("Rotation: quaternion matrix must be square");
    for (int u = 0; u < 4; ++u) {
      Eigen::VectorXd col(dim);
      for (int l = 0; l < len; ++l) set_quat(col, l, units[u] * m[row][l]);
      r.col(4 * row + u) = col;
    }
  }
  return Rotation(std::move(r));
}

namespace {

// M_{ml} = delta_{ml} - 2 conj(v_m) v_l / |v|^2, so that zeta M = R_v(zeta).
std::vector<std::vector<Quaternion>> householder(const QVector& v) {
  const int len = v.size();
  const double v2 = v.coords().squaredNorm();
  std::vector<std::vector<Quaternion>> m(len, std::vector<Quaternion>(len));
  for (int r = 0; r < len; ++r)
    for (int c = 0; c < len; ++c)
      m[r][c] = (r == c ? Quaternion::one() : Quaternion{}) - (2.0 / v2) * (v[r].conj() * v[c]);
  return m;
}

std::vector<std::vector<Quaternion>> diagonal(const std::vector<Quaternion>& d) {
  const int len = static_cast<int>(d.size());
  std::vector<std::vector<Quaternion>> m(len, std::vector<Quaternion>(len));
  for (int r = 0; r < len; ++r) m[r][r] = d[r];
  return m;
}

}  // namespace

Rotation rotation_to_north(const SpherePoint& xi) {
  const int n = xi.n();
  const int dim = xi.dim();
  const Quaternion t = xi.q()[n];
  std::vector<Quaternion> phase(n + 1, Quaternion::one());
  if (t.norm() > 0.0) phase[n] = t.conj() / t.norm();
  Rotation r = Rotation::from_quaternion_matrix(diagonal(phase));

  Eigen::VectorXd v = r.apply(xi.x());
  v[dim - 4] -= 1.0;
  if (v.norm() < 1e-14) return r;
  return r.then(Rotation::from_quaternion_matrix(householder(QVector(v))));
}

Rotation north_stabilizer(int n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("north_stabilizer: n < 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto random_unit = [&] {
    Quaternion q{normal(rng), normal(rng), normal(rng), normal(rng)};
    return q / q.norm();
  };
  std::vector<Quaternion> phase(n + 1, Quaternion::one());
  for (int l = 0; l < n; ++l) phase[l] = random_unit();
  Rotation r = Rotation::from_quaternion_matrix(diagonal(phase));
  if (n > 1) {
    QVector v(n + 1);
    for (int l = 0; l < n; ++l) v.set(l, random_unit());
    r = r.then(Rotation::from_quaternion_matrix(householder(v)));
  }
  return r;
}

Eigen::VectorXd gamma(double lambda, const SpherePoint& xi,
                      const Eigen::Ref<const Eigen::VectorXd>& zeta) {
  return Automorphism::dilation(lambda, xi).apply(zeta);
}

Automorphism Automorphism::identity(int n) {
  return rotation(Rotation::identity(4 * n + 4));
}

Automorphism Automorphism::rotation(Rotation r) { return Automorphism(RotationKind{std::move(r)}); }

Automorphism Automorphism::dilation(double lambda, const SpherePoint& xi) {
  return dilation(lambda, xi, rotation_to_north(xi));
}

Automorphism Automorphism::dilation(double lambda, const SpherePoint& xi, Rotation to_north) {
  check_lambda(lambda, "Automorphism::dilation");
  if (to_north.dim() != xi.dim())
    throw std::invalid_argument("Automorphism::dilation: rotation dimension mismatch");
  return Automorphism(DilationKind{lambda, xi.x(), std::move(to_north)});
}

Automorphism Automorphism::compose(const Automorphism& a, const Automorphism& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("Automorphism::compose: dimension mismatch");
  CompositionKind c;
  auto append = [&c](const Automorphism& x) {
    if (const auto* inner = std::get_if<CompositionKind>(&x.kind_))
      c.parts.insert(c.parts.end(), inner->parts.begin(), inner->parts.end());
    else
      c.parts.push_back(x);
  };
  append(a);
  append(b);
  return Automorphism(std::move(c));
}

Eigen::VectorXd Automorphism::apply(const Eigen::Ref<const Eigen::VectorXd>& zeta) const {
  if (zeta.size() != dim()) throw std::invalid_argument("Automorphism::apply: dimension mismatch");
  if (const auto* r = std::get_if<RotationKind>(&kind_)) return r->rotation.apply(zeta);
  if (const auto* d = std::get_if<DilationKind>(&kind_)) {
    if (d->lambda == 1.0) return zeta;
    const Eigen::MatrixXd& a = d->to_north.matrix();
    return a.transpose() * gamma_north(d->lambda, a * zeta);
  }
  const auto& parts = std::get<CompositionKind>(kind_).parts;
  Eigen::VectorXd x = zeta;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) x = it->apply(x);
  return x;
}

Automorphism Automorphism::inverse() const {
  if (const auto* r = std::get_if<RotationKind>(&kind_))
    return Automorphism(RotationKind{r->rotation.inverse()});
  if (const auto* d = std::get_if<DilationKind>(&kind_))
    return Automorphism(DilationKind{1.0 / d->lambda, d->xi, d->to_north});
  const auto& parts = std::get<CompositionKind>(kind_).parts;
  CompositionKind c;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) c.parts.push_back(it->inverse());
  return Automorphism(std::move(c));
}

double Automorphism::conformal_jacobian(const Eigen::Ref<const Eigen::VectorXd>& zeta) const {
  if (std::holds_alternative<RotationKind>(kind_)) return 1.0;
  if (const auto* d = std::get_if<DilationKind>(&kind_)) {
    if (d->lambda == 1.0) return 1.0;
    return gamma_north_jacobian(d->lambda, d->to_north.matrix() * zeta);
  }
  const auto& parts = std::get<CompositionKind>(kind_).parts;
  Eigen::VectorXd x = zeta;
  double jac = 1.0;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    jac *= it->conformal_jacobian(x);
    x = it->apply(x);
  }
  return jac;
}

int Automorphism::dim() const {
  if (const auto* r = std::get_if<RotationKind>(&kind_)) return r->rotation.dim();
  if (const auto* d = std::get_if<DilationKind>(&kind_)) return static_cast<int>(d->xi.size());
  const auto& parts = std::get<CompositionKind>(kind_).parts;
  return parts.empty() ? 0 : parts.front().dim();
}

bool Automorphism::is_identity() const {
  if (const auto* r = std::get_if<RotationKind>(&kind_))
    return r->rotation.matrix().isIdentity(0.0);
  if (const auto* d = std::get_if<DilationKind>(&kind_)) return d->lambda == 1.0;
  const auto& parts = std::get<CompositionKind>(kind_).parts;
  return std::all_of(parts.begin(), parts.end(), [](const Automorphism& a) { return a.is_identity(); });
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c);
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != n)
      throw std::invalid_argument("Automorphism JSON: matrix must be square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace

nlohmann::json Automorphism::to_json() const {
  nlohmann::json j;
  if (const auto* r = std::get_if<RotationKind>(&kind_)) {
    j["kind"] = "rotation";
    j["matrix"] = matrix_json(r->rotation.matrix());
  } else if (const auto* d = std::get_if<DilationKind>(&kind_)) {
    j["kind"] = "dilation";
    j["lambda"] = d->lambda;
    j["xi"] = std::vector<double>(d->xi.data(), d->xi.data() + d->xi.size());
    j["matrix"] = matrix_json(d->to_north.matrix());
  } else {
    j["kind"] = "composition";
    j["parts"] = nlohmann::json::array();
    for (const auto& p : std::get<CompositionKind>(kind_).parts) j["parts"].push_back(p.to_json());
  }
  return j;
}

Automorphism Automorphism::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "rotation") return rotation(Rotation(matrix_from_json(j.at("matrix"))));
  if (kind == "dilation") {
    const auto xi = j.at("xi").get<std::vector<double>>();
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xi.data(), static_cast<Eigen::Index>(xi.size()));
    return dilation(j.at("lambda").get<double>(), SpherePoint::normalized(std::move(x)),
                    Rotation(matrix_from_json(j.at("matrix"))));
  }
  if (kind == "composition") {
    CompositionKind c;
    for (const auto& p : j.at("parts")) c.parts.push_back(from_json(p));
    if (c.parts.empty()) throw std::invalid_argument("Automorphism JSON: empty composition");
    return Automorphism(std::move(c));
  }
  throw std::invalid_argument("Automorphism JSON: unknown kind '" + kind + "'");
}

double jacobian(const Automorphism& phi, const Eigen::VectorXd& zeta, double h) {
  const Eigen::MatrixXd basis = tangent_basis(zeta);
  Eigen::MatrixXd diff(zeta.size(), basis.cols());
  const double c = std::cos(h), s = std::sin(h);
  for (Eigen::Index m = 0; m < basis.cols(); ++m) {
    // Great circle through zeta with initial velocity basis.col(m).
    const Eigen::VectorXd fp = phi.apply(c * zeta + s * basis.col(m));
    const Eigen::VectorXd fm = phi.apply(c * zeta - s * basis.col(m));
    diff.col(m) = (fp - fm) / (2.0 * h);
  }
  if (!diff.allFinite()) throw DomainError("jacobian: non-finite differential");
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(diff).singularValues();
  const double smax = sv.maxCoeff(), smin = sv.minCoeff();
  if (!(smin > 1e-12 * smax)) throw DomainError("jacobian: degenerate differential");
  double logdet = 0.0;
  for (Eigen::Index m = 0; m < sv.size(); ++m) logdet += std::log(sv[m]);
  return std::exp(logdet);
}

SphereFunction pullback(SphereFunction u, Automorphism phi, double r) {
  if (!(r > 0.0)) throw ValidationError("pullback: r must be positive");
  if (phi.is_identity()) return u;
  const double inv_r = 1.0 / r;
  return [u = std::move(u), phi = std::move(phi), inv_r](const Eigen::VectorXd& zeta) {
    return std::pow(phi.conformal_jacobian(zeta), inv_r) * u(phi.apply(zeta));
  };
}

PushforwardMixture::PushforwardMixture(std::vector<Component> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ValidationError("PushforwardMixture: no components");
  dim_ = static_cast<int>(components_.front().center.size());
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.mass >= 0.0)) throw ValidationError("PushforwardMixture: negative mass");
    total += c.mass;
  }
  if (!(total > 0.0)) throw ValidationError("PushforwardMixture: zero total mass");
  double acc = 0.0;
  for (auto& c : components_) {
    if (static_cast<int>(c.center.size()) != dim_)
      throw ValidationError("PushforwardMixture: dimension mismatch");
    c.mass /= total;
    acc += c.mass;
    cumulative_.push_back(acc);
    const SpherePoint xi(c.center);
    maps_.push_back(Automorphism::dilation(c.lambda, xi));
    inverses_.push_back(maps_.back().inverse());
  }
  cumulative_.back() = 1.0;
  area_ = sphere_area(dim_);
}

double PushforwardMixture::density(const Eigen::Ref<const Eigen::VectorXd>& eta) const {
  double p = 0.0;
  for (std::size_t m = 0; m < components_.size(); ++m)
    if (components_[m].mass > 0.0) p += components_[m].mass * inverses_[m].conformal_jacobian(eta);
  return p / area_;
}

SampleTransform PushforwardMixture::transform() const {
  return [self = *this](const Eigen::VectorXd& uniform, double u01, Eigen::VectorXd& out) {
    const auto it = std::upper_bound(self.cumulative_.begin(), self.cumulative_.end(), u01);
    const std::size_t m = std::min<std::size_t>(it - self.cumulative_.begin(),
                                                self.components_.size() - 1);
    out = self.maps_[m].apply(uniform);
    return 1.0 / self.density(out);
  };
}

}  // namespace qcs
