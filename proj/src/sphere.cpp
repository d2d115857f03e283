#include "qcs/sphere.hpp"

#include "qcs/errors.hpp"

#include <cmath>
#include <string>

namespace qcs {

SpherePoint::SpherePoint(QVector v) : v_(std::move(v)) {
  const double n2 = v_.coords().squaredNorm();
  if (std::abs(n2 - 1.0) > 1e-12)
    throw DomainError("SpherePoint: <zeta,zeta> = " + std::to_string(n2) + " is not 1");
}

SpherePoint SpherePoint::normalized(QVector v) {
  const double nrm = v.norm();
  if (nrm == 0.0) throw DomainError("SpherePoint: cannot normalize the zero vector");
  v.coords() /= nrm;
  return SpherePoint(std::move(v), Unchecked{});
}

SpherePoint SpherePoint::north(int n) {
  QVector v(n + 1);
  v.set(n, Quaternion::one());
  return SpherePoint(std::move(v), Unchecked{});
}

SphereFunction homogeneous_extension(SphereFunction f) {
  return [f = std::move(f)](const Eigen::VectorXd& x) { return f(x / x.norm()); };
}

Quaternion axis_unit(Axis axis) {
  switch (axis) {
    case Axis::i: return Quaternion::i();
    case Axis::j: return Quaternion::j();
    case Axis::k: return Quaternion::k();
  }
  return Quaternion::i();
}

std::array<Eigen::VectorXd, 3> vertical_fields(const Eigen::Ref<const Eigen::VectorXd>& zeta) {
  return {left_mul(-Quaternion::i(), zeta), left_mul(-Quaternion::j(), zeta),
          left_mul(-Quaternion::k(), zeta)};
}

Eigen::VectorXd ambient_gradient(const SphereFunction& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index m = 0; m < x.size(); ++m) {
    xp[m] = x[m] + h;
    const double fp = f(xp);
    xp[m] = x[m] - h;
    const double fm = f(xp);
    xp[m] = x[m];
    g[m] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double vertical_derivative(const SphereFunction& f, const Eigen::VectorXd& zeta, Axis axis,
                           double h) {
  const Eigen::VectorXd g = ambient_gradient(f, zeta, h);
  double acc = 0.0;
  for (Eigen::Index l = 0; l < zeta.size() / 4; ++l) {
    const double a = zeta[4 * l], b = zeta[4 * l + 1], c = zeta[4 * l + 2], d = zeta[4 * l + 3];
    const double fa = g[4 * l], fb = g[4 * l + 1], fc = g[4 * l + 2], fd = g[4 * l + 3];
    switch (axis) {
      // -i zeta = b - a i + d j - c k
      case Axis::i: acc += b * fa - a * fb + d * fc - c * fd; break;
      // -j zeta = c - d i - a j + b k
      case Axis::j: acc += c * fa - d * fb - a * fc + b * fd; break;
      // -k zeta = d + c i - b j - a k
      case Axis::k: acc += d * fa + c * fb - b * fc - a * fd; break;
    }
  }
  return acc;
}

double vertical_flow_derivative(const SphereFunction& f, const Eigen::VectorXd& zeta, Axis axis,
                                double h) {
  const Quaternion u = axis_unit(axis);
  const double fp = f(left_mul(exp_imag(-h, u), zeta));
  const double fm = f(left_mul(exp_imag(h, u), zeta));
  return (fp - fm) / (2.0 * h);
}

Eigen::VectorXd tangential_gradient(const SphereFunction& f, const Eigen::VectorXd& zeta,
                                    double h) {
  Eigen::VectorXd g = ambient_gradient(f, zeta, h);
  g -= g.dot(zeta) * zeta;
  return g;
}

Eigen::VectorXd project_horizontal(const Eigen::VectorXd& ambient_grad,
                                   const Eigen::Ref<const Eigen::VectorXd>& zeta) {
  Eigen::VectorXd g = ambient_grad - ambient_grad.dot(zeta) * zeta;
  for (const auto& t : vertical_fields(zeta)) g -= g.dot(t) * t;
  return g;
}

Eigen::VectorXd horizontal_gradient(const SphereFunction& f, const Eigen::VectorXd& zeta,
                                    double h) {
  return project_horizontal(ambient_gradient(f, zeta, h), zeta);
}

Eigen::MatrixXd TangentFrame::all() const {
  Eigen::MatrixXd m(base.size(), 3 + horizontal.cols());
  for (int a = 0; a < 3; ++a) m.col(a) = vertical[a];
  m.rightCols(horizontal.cols()) = horizontal;
  return m;
}

namespace {

// Extends the orthonormal columns in `start` to an orthonormal basis of R^D by
// Gram-Schmidt over the coordinate vectors, returning only the new columns.
Eigen::MatrixXd complete_basis(const Eigen::MatrixXd& start) {
  const Eigen::Index dim = start.rows();
  Eigen::MatrixXd basis(dim, dim);
  Eigen::Index filled = start.cols();
  basis.leftCols(filled) = start;
  for (Eigen::Index m = 0; m < dim && filled < dim; ++m) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, m);
    for (int pass = 0; pass < 2; ++pass)
      v -= basis.leftCols(filled) * (basis.leftCols(filled).transpose() * v);
    const double nrm = v.norm();
    if (nrm < 1e-6) continue;
    basis.col(filled++) = v / nrm;
  }
  return basis.rightCols(dim - start.cols());
}

}  // namespace

TangentFrame tangent_frame(const Eigen::VectorXd& zeta) {
  TangentFrame frame;
  frame.base = zeta;
  frame.vertical = vertical_fields(zeta);
  Eigen::MatrixXd start(zeta.size(), 4);
  start.col(0) = zeta;
  for (int a = 0; a < 3; ++a) start.col(a + 1) = frame.vertical[a];
  frame.horizontal = complete_basis(start);
  return frame;
}

Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& x) {
  Eigen::MatrixXd start(x.size(), 1);
  start.col(0) = x;
  return complete_basis(start);
}

double spherical_laplacian(const SphereFunction& f, const Eigen::VectorXd& x, double h) {
  // For a 0-homogeneous F, the ambient Laplacian on |x| = 1 equals the
  // spherical Laplacian of its restriction.
  const SphereFunction ext = homogeneous_extension(f);
  const double f0 = ext(x);
  double acc = 0.0;
  Eigen::VectorXd xp = x;
  for (Eigen::Index m = 0; m < x.size(); ++m) {
    xp[m] = x[m] + h;
    const double fp = ext(xp);
    xp[m] = x[m] - h;
    const double fm = ext(xp);
    xp[m] = x[m];
    acc += fp - 2.0 * f0 + fm;
  }
  return acc / (h * h);
}

EigenCheck laplacian_eigen_check(const RealPolynomial& h, const QuadratureSpec& points) {
  if (!h.is_homogeneous()) throw ValidationError("laplacian_eigen_check: h is not homogeneous");
  if (!h.laplacian().is_zero(1e-12))
    throw ValidationError("laplacian_eigen_check: h is not harmonic (ambient Laplacian != 0)");
  const int dim = h.dim();
  const int k = h.degree();
  EigenCheck out;
  out.expected = -static_cast<double>(k) * (k + dim - 2);
  out.points = static_cast<int>(points.sample_count);
  if (h.terms().empty()) return out;

  const Eigen::MatrixXd pts = sample_uniform(points, dim);
  const SphereFunction f = [&h](const Eigen::VectorXd& x) { return h.evaluate(x); };
  double num = 0.0, den = 0.0, max_dev = 0.0, max_h = 0.0;
  for (Eigen::Index s = 0; s < pts.cols(); ++s) {
    const Eigen::VectorXd x = pts.col(s);
    const double hv = f(x);
    const double lap = spherical_laplacian(f, x);
    num += hv * lap;
    den += hv * hv;
    max_dev = std::max(max_dev, std::abs(lap - out.expected * hv));
    max_h = std::max(max_h, std::abs(hv));
  }
  out.eigenvalue = den > 0.0 ? num / den : 0.0;
  out.max_pointwise = max_h > 0.0 ? max_dev / max_h : 0.0;
  return out;
}

}  // namespace qcs
