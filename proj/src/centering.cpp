#include "qcs/centering.hpp"

#include "qcs/errors.hpp"

#include <cmath>
#include <limits>

namespace qcs {

namespace {

Eigen::VectorXd antipode(const SpherePoint& p) { return -p.x(); }

}  // namespace

Density Density::uniform(int n) {
  if (n < 0) throw ValidationError("Density::uniform: n < 0");
  const double inv_area = 1.0 / sphere_area_qc(n);
  Density d;
  d.name = "uniform";
  d.params = nlohmann::json::object();
  d.n = n;
  d.f = [inv_area](const Eigen::VectorXd&) { return inv_area; };
  return d;
}

Density Density::bubble(double lambda, const SpherePoint& xi0) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ValidationError("Density::bubble: lambda must be positive");
  const int n = xi0.n();
  const double inv_area = 1.0 / sphere_area_qc(n);
  const Automorphism inv = Automorphism::dilation(1.0 / lambda, xi0);
  Density d;
  d.name = "bubble";
  d.params = {{"lambda", lambda},
              {"xi0", std::vector<double>(xi0.x().data(), xi0.x().data() + xi0.dim())}};
  d.n = n;
  d.f = [inv, inv_area](const Eigen::VectorXd& z) { return inv.conformal_jacobian(z) * inv_area; };
  d.proposal.emplace(std::vector<PushforwardMixture::Component>{{lambda, xi0.x(), 1.0}});
  return d;
}

Density Density::two_bubble(int n, double lambda, double mass) {
  if (!(mass >= 0.0 && mass <= 1.0)) throw ValidationError("Density::two_bubble: mass not in [0,1]");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ValidationError("Density::two_bubble: lambda must be positive");
  const SpherePoint north = SpherePoint::north(n);
  const SpherePoint south(antipode(north));
  const double inv_area = 1.0 / sphere_area_qc(n);
  const Automorphism at_n = Automorphism::dilation(1.0 / lambda, north);
  const Automorphism at_s = Automorphism::dilation(1.0 / lambda, south);
  Density d;
  d.name = "two-bubble";
  d.params = {{"lambda", lambda}, {"mass", mass}};
  d.n = n;
  d.f = [=](const Eigen::VectorXd& z) {
    return (mass * at_n.conformal_jacobian(z) + (1.0 - mass) * at_s.conformal_jacobian(z)) *
           inv_area;
  };
  d.proposal.emplace(std::vector<PushforwardMixture::Component>{
      {lambda, north.x(), mass}, {lambda, south.x(), 1.0 - mass}});
  return d;
}

Density Density::custom(int n, SphereFunction g, const QuadratureSpec& spec, std::string name) {
  const McEstimate mass = integrate_mc(g, spec, 4 * n + 4);
  if (!(mass.value > 0.0)) throw ValidationError("Density::custom: integral is not positive");
  const double inv = 1.0 / mass.value;
  Density d;
  d.name = std::move(name);
  d.params = {{"normalization", mass.value}, {"normalization_stderr", mass.std_error}};
  d.n = n;
  d.f = [g = std::move(g), inv](const Eigen::VectorXd& z) { return g(z) * inv; };
  return d;
}

namespace {

SampleTransform proposal_transform(const Density& d) {
  return d.proposal ? d.proposal->transform() : SampleTransform{};
}

struct VectorSum {
  Eigen::VectorXd v;
  void merge(const VectorSum& o) { v += o.v; }
};

}  // namespace

BalanceMap::BalanceMap(const BalanceProblem& prob, Execution exec)
    : chunk_size_(prob.quadrature.chunk_size), exec_(exec) {
  if (!(prob.r > 0.0)) throw ValidationError("BalanceProblem: r must be positive");
  if (!prob.density.f) throw ValidationError("BalanceProblem: density has no function");
  const int dim = prob.density.dim();
  WeightedSamples s = draw_samples(prob.quadrature, dim, proposal_transform(prob.density), exec);
  points_ = std::move(s.points);
  coeffs_.resize(points_.cols());
  for (Eigen::Index c = 0; c < points_.cols(); ++c) {
    const double fv = prob.density.f(points_.col(c));
    if (!(fv >= 0.0) || !std::isfinite(fv))
      throw ValidationError("BalanceProblem: density must be finite and nonnegative");
    coeffs_[c] = s.weights[c] * fv;
  }
  const double total = coeffs_.sum();
  if (!(total > 0.0)) throw ValidationError("BalanceProblem: density vanishes on every sample");
  mass_ = total / static_cast<double>(coeffs_.size());
  coeffs_ /= total;
  ess_ = 1.0 / coeffs_.squaredNorm();
  const Eigen::VectorXd f0 = points_ * coeffs_;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index c = 0; c < points_.cols(); ++c)
    var += coeffs_[c] * coeffs_[c] * (points_.col(c) - f0).cwiseAbs2();
  center_stderr_ = std::sqrt(var.maxCoeff());
}

Eigen::VectorXd BalanceMap::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim()) throw std::invalid_argument("BalanceMap: dimension mismatch");
  const double r = x.norm();
  if (!(r < 1.0)) throw ValidationError("BalanceMap: |x| must be < 1");
  ++evals_;
  const int dim = this->dim();
  if (r == 0.0) return points_ * coeffs_;

  const double lambda = 1.0 - r;
  const double l2 = lambda * lambda;
  const Eigen::MatrixXd a = rotation_to_north(SpherePoint::normalized(Eigen::VectorXd(x / r))).matrix();
  const int last = dim / 4 - 1;
  const auto count = static_cast<std::uint64_t>(points_.cols());
  const VectorSum total = chunked_reduce(
      count, chunk_size_, VectorSum{Eigen::VectorXd::Zero(dim)},
      [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
        VectorSum part{Eigen::VectorXd::Zero(dim)};
        const auto b = static_cast<Eigen::Index>(begin);
        const auto len = static_cast<Eigen::Index>(end - begin);
        const Eigen::MatrixXd y = a * points_.middleCols(b, len);
        for (Eigen::Index c = 0; c < len; ++c) {
          const double w = coeffs_[b + c];
          const Quaternion t = quat_at(y.col(c), last);
          const Quaternion inv =
              qinv(Quaternion::one() + t + l2 * (Quaternion::one() - t));
          for (int l = 0; l < last; ++l) {
            const Quaternion g = 2.0 * lambda * quat_at(y.col(c), l) * inv;
            part.v[4 * l] += w * g.a;
            part.v[4 * l + 1] += w * g.b;
            part.v[4 * l + 2] += w * g.c;
            part.v[4 * l + 3] += w * g.d;
          }
          const Quaternion g = (Quaternion::one() + t - l2 * (Quaternion::one() - t)) * inv;
          part.v[4 * last] += w * g.a;
          part.v[4 * last + 1] += w * g.b;
          part.v[4 * last + 2] += w * g.c;
          part.v[4 * last + 3] += w * g.d;
        }
        return part;
      },
      exec_);
  return a.transpose() * total.v;
}

Eigen::MatrixXd BalanceMap::jacobian(const Eigen::VectorXd& x, double h) const {
  const double room = 1.0 - x.norm();
  if (h >= 0.5 * room) h = 0.25 * room;
  Eigen::MatrixXd j(dim(), dim());
  Eigen::VectorXd xp = x;
  for (int m = 0; m < dim(); ++m) {
    xp[m] = x[m] + h;
    const Eigen::VectorXd fp = (*this)(xp);
    xp[m] = x[m] - h;
    const Eigen::VectorXd fm = (*this)(xp);
    xp[m] = x[m];
    j.col(m) = (fp - fm) / (2.0 * h);
  }
  return j;
}

Eigen::VectorXd balance_map(const BalanceProblem& prob, const Eigen::VectorXd& x) {
  return BalanceMap(prob)(x);
}

Automorphism balance_automorphism(const Eigen::VectorXd& x) {
  const double r = x.norm();
  if (!(r < 1.0)) throw ValidationError("balance_automorphism: |x| must be < 1");
  const int n = static_cast<int>(x.size() / 4) - 1;
  if (r == 0.0) return Automorphism::identity(n);
  return Automorphism::dilation(1.0 - r, SpherePoint::normalized(Eigen::VectorXd(x / r)));
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  Eigen::VectorXd x;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

constexpr double kMaxRadius = 1.0 - 1e-9;

// Damped Newton on G(x) = F(x) - shift.
NewtonOutcome newton(const BalanceMap& map, Eigen::VectorXd x, const Eigen::VectorXd& shift,
                     double tol, int max_iter) {
  NewtonOutcome out;
  Eigen::VectorXd g = map(x) - shift;
  out.x = x;
  out.residual = g.norm();
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it;
    if (g.norm() <= tol) {
      out.converged = true;
      return out;
    }
    const Eigen::VectorXd step = map.jacobian(x).fullPivLu().solve(-g);
    if (!step.allFinite()) return out;
    double t = 1.0;
    bool accepted = false;
    while (t > 1e-6) {
      const Eigen::VectorXd xn = x + t * step;
      if (xn.norm() < kMaxRadius) {
        const Eigen::VectorXd gn = map(xn) - shift;
        if (gn.norm() < (1.0 - 1e-4 * t) * g.norm()) {
          x = xn;
          g = gn;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (g.norm() < out.residual) {
      out.residual = g.norm();
      out.x = x;
    }
    if (!accepted) return out;
  }
  out.iterations = max_iter;
  out.converged = g.norm() <= tol;
  return out;
}

}  // namespace

CenteringResult find_centering(const BalanceProblem& prob, const CenteringOptions& opt) {
  const BalanceMap map(prob);
  const int dim = map.dim();
  if (map.effective_samples() < opt.min_effective_samples)
    throw ValidationError("find_centering: density is under-resolved (effective samples " +
                          std::to_string(map.effective_samples()) + ")");

  CenteringResult res;
  res.effective_samples = map.effective_samples();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dim);
  const Eigen::VectorXd f0 = map(zero);
  double best = f0.norm();

  auto finish = [&](CenteringResult& r) {
    r.phi = balance_automorphism(r.root).inverse();
    r.identity = r.root.norm() == 0.0;
    if (opt.verify) {
      QuadratureSpec vs = prob.quadrature;
      vs.seed = prob.quadrature.seed + opt.verify_seed_offset;
      r.verification = verify_centering(prob, r.phi, vs);
      r.verification.passed =
          r.verification.norm <= prob.tol + 4.0 * r.verification.std_error;
    }
    return r;
  };

  if (f0.norm() <= prob.tol) {
    res.root = zero;
    res.residual = f0.norm();
    res.start_index = 0;
    return finish(res);
  }

  std::vector<Eigen::VectorXd> starts{zero};
  for (int axis : {0, dim / 2 - 1, dim - 1}) {
    starts.push_back(0.5 * Eigen::VectorXd::Unit(dim, axis));
    starts.push_back(-0.5 * Eigen::VectorXd::Unit(dim, axis));
  }
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const NewtonOutcome o = newton(map, starts[s], zero, prob.tol, opt.max_iterations);
    best = std::min(best, o.residual);
    if (o.converged) {
      res.root = o.x;
      res.residual = o.residual;
      res.iterations = o.iterations;
      res.start_index = static_cast<int>(s);
      return finish(res);
    }
  }

  // Homotopy G_t(x) = F(x) - (1 - t) F(0), walked from t = 0 at x = 0.
  Eigen::VectorXd x = zero;
  int total_iter = 0;
  constexpr int kSteps = 40;
  for (int step = 1; step <= kSteps; ++step) {
    const double t = static_cast<double>(step) / kSteps;
    const double stage_tol = step == kSteps ? prob.tol : std::max(prob.tol, 1e-3 * f0.norm());
    const NewtonOutcome o = newton(map, x, (1.0 - t) * f0, stage_tol, opt.max_iterations);
    total_iter += o.iterations;
    if (step == kSteps) best = std::min(best, o.residual);
    if (!o.converged) break;
    x = o.x;
    if (step == kSteps) {
      res.root = x;
      res.residual = o.residual;
      res.iterations = total_iter;
      res.used_homotopy = true;
      return finish(res);
    }
  }
  throw ConvergenceError("find_centering: no start converged (best |F| = " +
                             std::to_string(best) + ")",
                         best);
}

CenteringVerification verify_centering(const BalanceProblem& prob, const Automorphism& phi,
                                       const QuadratureSpec& spec) {
  const Density& d = prob.density;
  const int dim = d.dim();
  const double r = prob.r;
  const SphereFunction f = d.f;
  const SphereFunction u = [f, r](const Eigen::VectorXd& z) { return std::pow(f(z), 1.0 / r); };
  const SphereFunction pulled = pullback(u, phi, r);

  SampleTransform transform;
  if (d.proposal) {
    // zeta = Phi^{-1}(eta) with eta from the proposal; its density is p(Phi zeta)|J_Phi(zeta)|.
    const Automorphism gamma = phi.inverse();
    const PushforwardMixture prop = *d.proposal;
    const SampleTransform base = prop.transform();
    transform = [base, gamma, phi, prop](const Eigen::VectorXd& uni, double u01,
                                          Eigen::VectorXd& out) {
      Eigen::VectorXd eta;
      base(uni, u01, eta);
      out = gamma.apply(eta);
      return 1.0 / (prop.density(phi.apply(out)) * phi.conformal_jacobian(out));
    };
  }
  const McVectorEstimate est = integrate_mc_vec(
      [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) {
        const double g = std::pow(std::abs(pulled(z)), r);
        out.head(dim) = g * z;
        out[dim] = g;
        out[dim + 1] = std::pow(std::abs(u(z)), r);
      },
      dim + 2, spec, dim, transform);

  CenteringVerification v;
  v.moment = est.value.head(dim);
  v.norm = v.moment.norm();
  v.std_error = std::sqrt(std::max(0.0, est.covariance.topLeftCorner(dim, dim).trace()));
  v.lr_after = est.value[dim];
  v.lr_before = est.value[dim + 1];
  v.lr_std_error = std::sqrt(std::max(0.0, est.covariance(dim, dim)));
  v.passed = v.norm <= prob.tol + 4.0 * v.std_error;
  return v;
}

nlohmann::json CenteringResult::to_json() const {
  nlohmann::json j;
  j["phi"] = phi.to_json();
  j["root"] = std::vector<double>(root.data(), root.data() + root.size());
  j["residual"] = residual;
  j["iterations"] = iterations;
  j["start_index"] = start_index;
  j["identity"] = identity;
  j["used_homotopy"] = used_homotopy;
  j["effective_samples"] = effective_samples;
  if (verification.moment.size() > 0) {
    j["verification"] = {
        {"moment", std::vector<double>(verification.moment.data(),
                                       verification.moment.data() + verification.moment.size())},
        {"norm", verification.norm},
        {"std_error", verification.std_error},
        {"lr_before", verification.lr_before},
        {"lr_after", verification.lr_after},
        {"lr_std_error", verification.lr_std_error},
        {"passed", verification.passed}};
  }
  return j;
}

}  // namespace qcs
