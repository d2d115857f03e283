#include "qcs/experiments.hpp"

#include "qcs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace qcs {

Parameters::Parameters(int n_, double p_) : n(n_), p(p_) {
  if (n < 0) throw ValidationError("Parameters: n must be >= 0");
  if (!(p > 1.0 && p < Q())) throw ValidationError("Parameters: p must lie in (1, Q)");
}

namespace {

void check_n(int n) {
  if (n < 1) throw ValidationError("sharp constants need n >= 1");
}

double two_star(int n) { return Parameters(n).p_star(); }

}  // namespace

double sharp_constant_qc(int n, AreaForm form) {
  check_n(n);
  const double q = 4.0 * n + 6.0;
  const double area = form == AreaForm::factorial ? sphere_area_qc(n) : sphere_area(4 * n + 4);
  return std::pow(std::pow(2.0, -2.0 * n) * area, -1.0 / q) /
         (2.0 * std::sqrt(static_cast<double>(n) * (n + 1)));
}

double sharp_constant_sphere(int n) {
  check_n(n);
  const double q = 4.0 * n + 6.0;
  return 1.0 / (4.0 * n * (n + 1) * std::pow(sphere_area_qc(n), 2.0 / q));
}

double sharp_constant_htype(int n) {
  check_n(n);
  const double q = 4.0 * n + 6.0;
  const double d = 4.0 * n + 3.0;
  const double log_ratio = log_gamma(d) - log_gamma(d / 2.0);
  return std::exp(-0.5 * std::log(4.0 * n * (4.0 * n + 4.0)) + (3.0 / q) * std::log(4.0) -
                  d / (2.0 * q) * std::log(std::numbers::pi) + log_ratio / q);
}

double sharp_constant_htype_duplication(int n) {
  check_n(n);
  const double q = 4.0 * n + 6.0;
  const double d = 4.0 * n + 3.0;
  // Gamma(2z) / Gamma(z) = 2^{2z-1} pi^{-1/2} Gamma(z + 1/2) with z = d/2.
  const double log_ratio = (d - 1.0) * std::log(2.0) - 0.5 * std::log(std::numbers::pi) +
                           log_gamma(2.0 * n + 2.0);
  return std::exp(-0.5 * std::log(4.0 * n * (4.0 * n + 4.0)) + (3.0 / q) * std::log(4.0) -
                  d / (2.0 * q) * std::log(std::numbers::pi) + log_ratio / q);
}

double group_extremal(const GroupPoint& g) {
  const double q2 = g.q().coords().squaredNorm();
  const double w2 = g.omega().norm2();
  return std::pow((1.0 + q2) * (1.0 + q2) + w2, -(g.n() + 1.0));
}

BubbleFamily::BubbleFamily(double lambda_, const SpherePoint& xi0)
    : lambda(lambda_), center(xi0.x()) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ValidationError("BubbleFamily: lambda must be positive");
}

SphereFunction BubbleFamily::profile() const {
  const int nn = n();
  const double r = two_star(nn);
  const double c = std::pow(sphere_area_qc(nn), -1.0 / r);
  const SphereFunction constant = [c](const Eigen::VectorXd&) { return c; };
  return pullback(constant, Automorphism::dilation(1.0 / lambda, SpherePoint(center)), r);
}

PushforwardMixture BubbleFamily::proposal() const {
  return PushforwardMixture({{lambda, center, 1.0}});
}

nlohmann::json QuotientEstimate::to_json() const {
  nlohmann::json j;
  if (finite)
    j["value"] = value;
  else
    j["value"] = "inf";
  j["std_error"] = std_error;
  j["lp_star"] = lp_star;
  j["lp_star_std_error"] = lp_star_std_error;
  j["energy"] = energy;
  j["energy_std_error"] = energy_std_error;
  j["finite"] = finite;
  if (!diagnostic.empty()) j["diagnostic"] = diagnostic;
  return j;
}

QuotientEstimate sobolev_quotient(const SphereFunction& u, const Parameters& par,
                                  const QuadratureSpec& spec, const SampleTransform& transform) {
  const int dim = 4 * par.n + 4;
  const double ps = par.p_star();
  const double p = par.p;
  const McVectorEstimate est = integrate_mc_vec(
      [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) {
        out[0] = std::pow(std::abs(u(z)), ps);
        const double g2 = horizontal_gradient(u, z).squaredNorm();
        out[1] = p == 2.0 ? g2 : std::pow(g2, 0.5 * p);
      },
      2, spec, dim, transform);

  QuotientEstimate q;
  q.lp_star = est.value[0];
  q.energy = est.value[1];
  q.lp_star_std_error = std::sqrt(std::max(0.0, est.covariance(0, 0)));
  q.energy_std_error = std::sqrt(std::max(0.0, est.covariance(1, 1)));
  if (!(q.lp_star > 0.0)) throw ValidationError("sobolev_quotient: u vanishes on every sample");
  if (!(q.energy > 0.0)) {
    q.value = std::numeric_limits<double>::infinity();
    q.finite = false;
    q.diagnostic =
        "horizontal gradient energy vanishes (constant function); the quotient diverges";
    return q;
  }
  const double num = std::pow(q.lp_star, p / ps);
  q.value = num / q.energy;
  Eigen::Vector2d g((p / ps) * num / q.lp_star / q.energy, -q.value / q.energy);
  q.std_error = std::sqrt(std::max(0.0, g.dot(est.covariance * g)));
  return q;
}

namespace {

void check_antipodal(const SpherePoint& xi1, const SpherePoint& xi2) {
  if (xi1.dim() != xi2.dim() || (xi1.x() + xi2.x()).norm() > 1e-12)
    throw ValidationError("two-bubble centers must be antipodal");
}

}  // namespace

SphereFunction two_bubble_profile(double lambda, double a, const SpherePoint& xi1,
                                  const SpherePoint& xi2) {
  check_antipodal(xi1, xi2);
  if (!(a > 0.0 && a <= 1.0)) throw ValidationError("two-bubble mass must lie in (0, 1]");
  const double r = two_star(xi1.n());
  const SphereFunction b1 = BubbleFamily(lambda, xi1).profile();
  if (a == 1.0) return b1;
  const SphereFunction b2 = BubbleFamily(lambda, xi2).profile();
  const double c1 = std::pow(a, 1.0 / r), c2 = std::pow(1.0 - a, 1.0 / r);
  return [b1, b2, c1, c2](const Eigen::VectorXd& z) { return c1 * b1(z) + c2 * b2(z); };
}

QuotientEstimate two_bubble_quotient(double lambda, double a, const SpherePoint& xi1,
                                     const SpherePoint& xi2, const QuadratureSpec& spec) {
  const SphereFunction u = two_bubble_profile(lambda, a, xi1, xi2);
  std::vector<PushforwardMixture::Component> comps{{lambda, xi1.x(), a}};
  if (a < 1.0) comps.push_back({lambda, xi2.x(), 1.0 - a});
  const PushforwardMixture prop(std::move(comps));
  return sobolev_quotient(u, Parameters(xi1.n(), 2.0), spec, prop.transform());
}

double concavity_gap(double a, int n) {
  const double e = 2.0 / two_star(n);
  return std::pow(a, e) + std::pow(1.0 - a, e) - 1.0;
}

Extrapolation extrapolate_lambda2(const std::vector<double>& lambdas,
                                  const std::vector<double>& values,
                                  const std::vector<double>& std_errors, int degree) {
  const int k = static_cast<int>(lambdas.size());
  if (k == 0 || values.size() != lambdas.size() || std_errors.size() != lambdas.size())
    throw ValidationError("extrapolate_lambda2: mismatched or empty inputs");
  degree = std::clamp(degree, 0, k - 1);
  const bool weighted =
      std::all_of(std_errors.begin(), std_errors.end(), [](double s) { return s > 0.0; });
  Eigen::MatrixXd a(k, degree + 1);
  Eigen::VectorXd w(k), y(k);
  for (int i = 0; i < k; ++i) {
    const double x = lambdas[i] * lambdas[i];
    for (int d = 0; d <= degree; ++d) a(i, d) = std::pow(x, d);
    w[i] = weighted ? 1.0 / (std_errors[i] * std_errors[i]) : 1.0;
    y[i] = values[i];
  }
  const Eigen::MatrixXd atw = a.transpose() * w.asDiagonal();
  const Eigen::MatrixXd l = (atw * a).ldlt().solve(atw);
  Extrapolation e;
  e.degree = degree;
  e.value = l.row(0).dot(y);
  double var = 0.0;
  for (int i = 0; i < k; ++i) var += l(0, i) * l(0, i) * std_errors[i] * std_errors[i];
  e.std_error = std::sqrt(var);
  return e;
}

nlohmann::json QuotientSeries::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["mass"] = mass;
  j["lambdas"] = lambdas;
  nlohmann::json ests = nlohmann::json::array();
  for (const auto& e : estimates) ests.push_back(e.to_json());
  j["estimates"] = ests;
  j["limit"] = {{"value", limit.value}, {"std_error", limit.std_error}, {"degree", limit.degree}};
  return j;
}

QuotientSeries quotient_series(int n, const std::vector<double>& lambdas, double a,
                               const QuadratureSpec& spec) {
  QuotientSeries s;
  s.n = n;
  s.mass = a;
  s.lambdas = lambdas;
  const SpherePoint north = SpherePoint::north(n);
  const SpherePoint south(Eigen::VectorXd(-north.x()));
  std::vector<double> vals, errs;
  for (double lambda : lambdas) {
    s.estimates.push_back(two_bubble_quotient(lambda, a, north, south, spec));
    vals.push_back(s.estimates.back().value);
    errs.push_back(s.estimates.back().std_error);
  }
  s.limit = extrapolate_lambda2(lambdas, vals, errs, 2);
  return s;
}

double cap_radius(double lambda) { return std::min(0.5, 10.0 * lambda); }

bool AtomReport::all_hold() const {
  return std::all_of(atoms.begin(), atoms.end(), [](const Atom& a) { return a.holds; });
}

nlohmann::json AtomReport::to_json() const {
  nlohmann::json j;
  j["radius"] = radius;
  j["threshold"] = threshold;
  j["constant"] = constant;
  j["tolerance"] = tolerance;
  j["total_nu"] = total_nu;
  j["all_hold"] = all_hold();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& a : atoms)
    arr.push_back({{"point", std::vector<double>(a.point.data(), a.point.data() + a.point.size())},
                   {"nu", a.nu},
                   {"nu_std_error", a.nu_std_error},
                   {"sigma", a.sigma},
                   {"sigma_std_error", a.sigma_std_error},
                   {"lhs", a.lhs},
                   {"bound", a.bound},
                   {"holds", a.holds}});
  j["atoms"] = arr;
  if (!diagnostic.empty()) j["diagnostic"] = diagnostic;
  return j;
}

namespace {

ResidualPoint masked_mean(const Eigen::VectorXd& contrib, const std::vector<char>& mask) {
  const auto count = static_cast<double>(contrib.size());
  CompensatedSum s1, s2;
  for (Eigen::Index i = 0; i < contrib.size(); ++i) {
    const double v = mask[i] ? contrib[i] : 0.0;
    s1.add(v);
    s2.add(v * v);
  }
  const double mean = s1.value() / count;
  const double var = std::max(0.0, s2.value() / count - mean * mean);
  return {mean, std::sqrt(var / count)};
}

}  // namespace

AtomReport cc_atom_check(const SphereFunction& u, int n, const QuadratureSpec& spec,
                         const AtomCheckOptions& opt, const SampleTransform& transform) {
  const Parameters par(n, 2.0);
  const double ps = par.p_star();
  AtomReport rep;
  rep.radius = opt.radius;
  rep.threshold = opt.threshold;
  rep.constant = opt.constant > 0.0 ? opt.constant : sharp_constant_qc(n);
  rep.tolerance = opt.tolerance;

  const WeightedSamples smp = draw_samples(spec, 4 * n + 4, transform);
  const Eigen::Index count = smp.points.cols();
  Eigen::VectorXd density(count), mass(count);
  for (Eigen::Index s = 0; s < count; ++s) {
    density[s] = std::pow(std::abs(u(smp.points.col(s))), ps);
    mass[s] = density[s] * smp.weights[s];
  }
  std::vector<Eigen::Index> order(count);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return density[a] > density[b]; });

  const double total = mass.mean();
  std::vector<char> claimed(count, 0);
  std::size_t cursor = 0;
  while (static_cast<int>(rep.atoms.size()) < opt.max_atoms) {
    while (cursor < order.size() && claimed[order[cursor]]) ++cursor;
    if (cursor >= order.size()) break;
    const Eigen::VectorXd seed = smp.points.col(order[cursor]);
    std::vector<char> in_cap(count, 0);
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(seed.size());
    for (Eigen::Index s = 0; s < count; ++s) {
      if ((smp.points.col(s) - seed).norm() < opt.radius) centroid += mass[s] * smp.points.col(s);
    }
    const Eigen::VectorXd center = centroid.norm() > 0.0 ? Eigen::VectorXd(centroid.normalized()) : seed;
    for (Eigen::Index s = 0; s < count; ++s)
      in_cap[s] = (smp.points.col(s) - center).norm() < opt.radius ? 1 : 0;
    const ResidualPoint nu = masked_mean(mass, in_cap);
    if (nu.value < opt.threshold * total) {
      if (rep.atoms.empty()) rep.diagnostic = "no concentration detected above the threshold";
      break;
    }
    Eigen::VectorXd grad(count);
#pragma omp parallel for schedule(static)
    for (Eigen::Index s = 0; s < count; ++s) {
      grad[s] = in_cap[s] ? horizontal_gradient(u, smp.points.col(s)).squaredNorm() * smp.weights[s]
                          : 0.0;
    }
    const ResidualPoint sigma = masked_mean(grad, in_cap);
    Atom a;
    a.point = center;
    a.nu = nu.value;
    a.nu_std_error = nu.std_error;
    a.sigma = sigma.value;
    a.sigma_std_error = sigma.std_error;
    a.lhs = std::pow(a.nu, 2.0 / ps);
    a.bound = rep.constant * a.sigma * (1.0 + opt.tolerance);
    a.holds = a.lhs <= a.bound;
    rep.atoms.push_back(a);
    rep.total_nu += a.nu;
    for (Eigen::Index s = 0; s < count; ++s)
      if ((smp.points.col(s) - center).norm() < 2.0 * opt.radius) claimed[s] = 1;
  }
  return rep;
}

std::vector<ResidualPoint> brezis_lieb_check(const SphereFunction& u,
                                             const std::vector<SphereFunction>& family, int n,
                                             double s, const QuadratureSpec& spec,
                                             const std::vector<SampleTransform>& transforms) {
  if (!(s > 0.0)) throw ValidationError("brezis_lieb_check: exponent must be positive");
  std::vector<ResidualPoint> out;
  for (std::size_t m = 0; m < family.size(); ++m) {
    const SphereFunction& v = family[m];
    const SampleTransform t = m < transforms.size() ? transforms[m] : SampleTransform{};
    const McVectorEstimate est = integrate_mc_vec(
        [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> o) {
          const double uv = u(z), vv = v(z);
          o[0] = std::pow(std::abs(vv), s);
          o[1] = std::pow(std::abs(uv), s);
          o[2] = std::pow(std::abs(vv - uv), s);
        },
        3, spec, 4 * n + 4, t);
    const Eigen::Vector3d g(1.0, -1.0, -1.0);
    out.push_back({std::abs(g.dot(est.value)), std::sqrt(std::max(0.0, g.dot(est.covariance * g)))});
  }
  return out;
}

ResidualPoint energy_splitting(const SphereFunction& u, const SphereFunction& w, int n,
                               const QuadratureSpec& spec, const SampleTransform& transform) {
  const McEstimate est = integrate_mc(
      [&](const Eigen::VectorXd& z) {
        return 2.0 * horizontal_gradient(u, z).dot(horizontal_gradient(w, z));
      },
      spec, 4 * n + 4, transform);
  return {est.value, est.std_error};
}

PushforwardMixture bump_and_bubble_proposal(double lambda, const SpherePoint& xi0,
                                            double uniform_mass) {
  if (!(uniform_mass >= 0.0 && uniform_mass <= 1.0))
    throw ValidationError("bump_and_bubble_proposal: uniform mass must lie in [0, 1]");
  return PushforwardMixture({{1.0, xi0.x(), uniform_mass}, {lambda, xi0.x(), 1.0 - uniform_mass}});
}

}  // namespace qcs
