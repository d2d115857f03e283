#include "qcs/cli.hpp"

#include "qcs/centering.hpp"
#include "qcs/conformal.hpp"
#include "qcs/errors.hpp"
#include "qcs/experiments.hpp"
#include "qcs/polynomial_spaces.hpp"
#include "qcs/quadrature.hpp"
#include "qcs/sphere.hpp"
#include "qcs/theta.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

namespace qcs::cli {

namespace {

using nlohmann::json;

struct Common {
  int n = 1;
  double p = 2.0;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  std::string out;
  std::string csv;
  int threads = 0;
};

struct Outcome {
  json params;
  json results;
  int code = kOk;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--n", c.n, "sphere index (S^{4n+3})");
  sub->add_option("--p", c.p, "Sobolev exponent");
  sub->add_option("--samples", c.samples, "Monte-Carlo samples");
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_option("--out", c.out, "write the JSON record here instead of stdout");
  sub->add_option("--csv", c.csv, "write a CSV side table here");
  sub->add_option("--threads", c.threads, "cap on worker threads (0 = default)");
}

QuadratureSpec quad(const Common& c) {
  if (c.samples == 0) throw ValidationError("--samples must be positive");
  return {c.samples, c.seed, 4096};
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

SpherePoint point_or_north(const std::vector<double>& xs, int n) {
  if (xs.empty()) return SpherePoint::north(n);
  if (static_cast<int>(xs.size()) != 4 * n + 4)
    throw ValidationError("point must have 4n+4 = " + std::to_string(4 * n + 4) + " coordinates");
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  return SpherePoint::normalized(std::move(x));
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be > 0");
}

json check_entry(const std::string& name, double value, double tol) {
  return {{"name", name}, {"value", value}, {"tolerance", tol}, {"passed", value <= tol}};
}

// ---- theta -----------------------------------------------------------------

struct ThetaArgs {
  int ell = 1;
  std::vector<int> jk;
  double theta = 0.8;
  int big_n = 8;
  int support_max = 0;
  int seeds = 3;
  bool trace = false;
};

Outcome cmd_theta(const Common& c, const ThetaArgs& a, bool n_given, bool big_n_given) {
  Outcome o;
  ConstraintSpec spec;
  if (!a.jk.empty()) {
    if (a.jk.size() != 2 || a.jk[0] < 0 || a.jk[1] < 0)
      throw ValidationError("--jk takes two nonnegative integers j,k");
    int n = c.n;
    if (big_n_given && !n_given) {
      if (a.big_n % 4 != 0 || a.big_n < 8) throw ValidationError("--jk needs N = 4n+4 with n >= 1");
      n = a.big_n / 4 - 1;
    } else if (big_n_given && a.big_n != 4 * n + 4) {
      throw ValidationError("--N must equal 4n+4 for bidegree constraints");
    }
    spec = ConstraintSpec::bidegree(a.jk[0], a.jk[1], n);
  } else {
    if (a.ell < 1) throw ValidationError("--ell must be >= 1");
    if (a.big_n < 2) throw ValidationError("--N must be >= 2");
    spec = ConstraintSpec::degree(a.ell, a.big_n);
  }
  if (!(a.theta > 0.0 && a.theta <= 1.0)) throw ValidationError("theta must lie in (0, 1]");
  if (a.seeds < 0) throw ValidationError("--seeds must be >= 0");

  const ConstraintSet cs = mean_zero_constraints(spec);
  ThetaOptions opt;
  opt.support_max = a.support_max;
  opt.seeds = a.seeds;
  opt.base_seed = c.seed;
  const ThetaResult r = solve_theta(cs, a.theta, opt);

  o.params = {{"constraints", spec.label()}, {"theta", a.theta},  {"N", spec.dim},
              {"support_max", a.support_max}, {"seeds", a.seeds}};
  o.results = r.to_json(a.trace);
  o.results["constraint_dimension"] = cs.size();
  json certs = json::array();
  std::vector<Candidate> cands{Candidate::antipodal, Candidate::simplex, Candidate::cross_polytope};
  if (spec.kind == ConstraintSpec::Kind::bidegree) cands.push_back(Candidate::real_simplex);
  for (Candidate cand : cands) {
    const ThetaResult cr = certify_candidate(cand, cs, a.theta, 1e-12);
    certs.push_back({{"candidate", to_string(cand)},
                     {"feasible", cr.feasible},
                     {"residual", cr.constraint_residual},
                     {"value", cr.value}});
  }
  o.results["certificates"] = certs;
  if (spec.kind == ConstraintSpec::Kind::degree && spec.ell <= 3) {
    const double base = spec.ell == 1 ? 2.0 : spec.ell == 2 ? spec.dim + 1.0 : 2.0 * spec.dim;
    const double closed = std::pow(base, 1.0 - a.theta);
    o.results["closed_form"] = {{"value", closed},
                                {"relative_error", std::abs(r.value - closed) / closed}};
  }
  if (!r.feasible) o.code = kNonConvergence;
  return o;
}

// ---- center ----------------------------------------------------------------

struct CenterArgs {
  std::string density = "two-bubble";
  double lambda = 0.3;
  double mass = 0.7;
  std::vector<double> xi0;
  double r = 0.0;
  double tol = 1e-6;
};

Outcome cmd_center(const Common& c, const CenterArgs& a) {
  Outcome o;
  const Parameters par(c.n, c.p);
  BalanceProblem prob;
  if (a.density == "uniform") {
    prob.density = Density::uniform(c.n);
  } else if (a.density == "bubble") {
    check_lambda(a.lambda);
    prob.density = Density::bubble(a.lambda, point_or_north(a.xi0, c.n));
  } else if (a.density == "two-bubble") {
    check_lambda(a.lambda);
    prob.density = Density::two_bubble(c.n, a.lambda, a.mass);
  } else {
    throw ValidationError("--density must be uniform, bubble or two-bubble");
  }
  prob.r = a.r > 0.0 ? a.r : par.p_star();
  prob.quadrature = quad(c);
  if (!(a.tol > 0.0)) throw ValidationError("--tol must be positive");
  prob.tol = a.tol;
  o.params = {{"density", a.density}, {"lambda", a.lambda}, {"mass", a.mass},
              {"xi0", a.xi0},         {"r", prob.r},        {"tol", a.tol}};
  try {
    const CenteringResult res = find_centering(prob);
    o.results = res.to_json();
    o.results["density"] = {{"name", prob.density.name}, {"params", prob.density.params}};
  } catch (const ConvergenceError& e) {
    o.results = {{"status", "non-convergence"}, {"message", e.what()},
                 {"best_residual", e.best_residual()}};
    o.code = kNonConvergence;
  }
  return o;
}

// ---- quotient / bubbles ----------------------------------------------------

struct QuotientArgs {
  double bubble = 0.1;
  std::vector<double> lambdas;
  double mass = 1.0;
  std::string profile = "bubble";
};

json targets_json(int n, double mass) {
  const double gap = concavity_gap(mass, n) + 1.0;
  return {{"sharp_constant_qc", sharp_constant_qc(n)},
          {"sharp_constant_sphere", sharp_constant_sphere(n)},
          {"mass_factor", 1.0 / gap},
          {"target_qc", sharp_constant_qc(n) / gap},
          {"target_sphere", sharp_constant_sphere(n) / gap}};
}

Outcome cmd_quotient(const Common& c, const QuotientArgs& a, CsvTable& csv) {
  Outcome o;
  const Parameters par(c.n, c.p);
  const QuadratureSpec spec = quad(c);
  o.params = {{"profile", a.profile}, {"mass", a.mass}};
  if (a.profile == "constant") {
    const SphereFunction u = [](const Eigen::VectorXd&) { return 1.0; };
    o.results = {{"estimate", sobolev_quotient(u, par, spec).to_json()}};
    return o;
  }
  if (a.profile != "bubble") throw ValidationError("--profile must be bubble or constant");
  if (!(a.mass > 0.0 && a.mass <= 1.0)) throw ValidationError("--mass must lie in (0, 1]");
  std::vector<double> lambdas = a.lambdas;
  if (lambdas.empty()) lambdas.push_back(a.bubble);
  for (double l : lambdas) check_lambda(l);
  o.params["lambdas"] = lambdas;
  const SpherePoint north = SpherePoint::north(c.n);
  const SpherePoint south(Eigen::VectorXd(-north.x()));
  csv.header = {"lambda", "quotient", "std_error", "lp_star", "energy", "energy_std_error"};

  json ests = json::array();
  std::vector<double> vals, errs;
  for (double l : lambdas) {
    QuotientEstimate q;
    if (par.p == 2.0) {
      q = two_bubble_quotient(l, a.mass, north, south, spec);
    } else {
      const SphereFunction u = two_bubble_profile(l, a.mass, north, south);
      std::vector<PushforwardMixture::Component> comps{{l, north.x(), a.mass}};
      if (a.mass < 1.0) comps.push_back({l, south.x(), 1.0 - a.mass});
      q = sobolev_quotient(u, par, spec, PushforwardMixture(comps).transform());
    }
    json e = q.to_json();
    e["lambda"] = l;
    ests.push_back(e);
    vals.push_back(q.value);
    errs.push_back(q.std_error);
    csv.rows.push_back({l, q.value, q.std_error, q.lp_star, q.energy, q.energy_std_error});
  }
  o.results["estimates"] = ests;
  if (par.p == 2.0) {
    json t = targets_json(c.n, a.mass);
    o.results["targets"] = t;
    if (lambdas.size() > 1) {
      const Extrapolation ex = extrapolate_lambda2(lambdas, vals, errs, 2);
      const double tq = t["target_qc"].get<double>();
      const double ts = t["target_sphere"].get<double>();
      o.results["limit"] = {{"value", ex.value},
                            {"std_error", ex.std_error},
                            {"degree", ex.degree},
                            {"relative_error_qc", std::abs(ex.value - tq) / tq},
                            {"relative_error_sphere", std::abs(ex.value - ts) / ts},
                            {"within_2pct_qc", std::abs(ex.value - tq) <= 0.02 * tq},
                            {"within_2pct_sphere", std::abs(ex.value - ts) <= 0.02 * ts}};
    }
  }
  return o;
}

struct BubblesArgs {
  std::vector<double> lambdas{0.4, 0.2, 0.1, 0.05};
  double mass = 0.5;
};

Outcome cmd_bubbles(const Common& c, const BubblesArgs& a, CsvTable& csv) {
  Outcome o;
  const QuadratureSpec spec = quad(c);
  if (!(a.mass > 0.0 && a.mass < 1.0)) throw ValidationError("--mass must lie in (0, 1)");
  for (double l : a.lambdas) check_lambda(l);
  if (a.lambdas.empty()) throw ValidationError("--lambdas must not be empty");
  o.params = {{"lambdas", a.lambdas}, {"mass", a.mass}};
  const QuotientSeries single = quotient_series(c.n, a.lambdas, 1.0, spec);
  const QuotientSeries pair = quotient_series(c.n, a.lambdas, a.mass, spec);
  csv.header = {"lambda", "single_lp_star", "single_energy", "single_quotient", "single_std_error",
                "pair_quotient", "pair_std_error", "ratio"};
  json rows = json::array();
  for (std::size_t i = 0; i < a.lambdas.size(); ++i) {
    const auto& s = single.estimates[i];
    const auto& p = pair.estimates[i];
    const double ratio = p.value / s.value;
    rows.push_back({{"lambda", a.lambdas[i]},
                    {"single", s.to_json()},
                    {"pair", p.to_json()},
                    {"ratio", ratio}});
    csv.rows.push_back({a.lambdas[i], s.lp_star, s.energy, s.value, s.std_error, p.value,
                        p.std_error, ratio});
  }
  o.results["rows"] = rows;
  const double ratio = pair.limit.value / single.limit.value;
  const double target = 1.0 / (concavity_gap(a.mass, c.n) + 1.0);
  o.results["single_limit"] = {{"value", single.limit.value}, {"std_error", single.limit.std_error}};
  o.results["pair_limit"] = {{"value", pair.limit.value}, {"std_error", pair.limit.std_error}};
  o.results["ratio"] = {{"value", ratio},
                        {"std_error", ratio * std::hypot(pair.limit.std_error / pair.limit.value,
                                                         single.limit.std_error / single.limit.value)},
                        {"target", target},
                        {"within_3pct", std::abs(ratio - target) <= 0.03 * target}};
  o.results["targets"] = targets_json(c.n, 1.0);
  return o;
}

// ---- cc ----------------------------------------------------------------------

struct CcArgs {
  double lambda = 0.05;
  std::string family = "single";
  double mass = 0.5;
  double radius = 0.0;
  double threshold = 0.05;
  double tol = 0.05;
};

Outcome cmd_cc(const Common& c, const CcArgs& a) {
  Outcome o;
  check_lambda(a.lambda);
  const QuadratureSpec spec = quad(c);
  const SpherePoint north = SpherePoint::north(c.n);
  const SpherePoint south(Eigen::VectorXd(-north.x()));
  SphereFunction u;
  SampleTransform transform;
  if (a.family == "single") {
    u = BubbleFamily(a.lambda, north).profile();
    transform = BubbleFamily(a.lambda, north).proposal().transform();
  } else if (a.family == "two") {
    if (!(a.mass > 0.0 && a.mass < 1.0)) throw ValidationError("--mass must lie in (0, 1)");
    u = two_bubble_profile(a.lambda, a.mass, north, south);
    transform = PushforwardMixture({{a.lambda, north.x(), a.mass}, {a.lambda, south.x(), 1.0 - a.mass}})
                    .transform();
  } else if (a.family == "smooth") {
    u = [](const Eigen::VectorXd& z) { return 1.0 + 0.5 * z[0]; };
  } else {
    throw ValidationError("--family must be single, two or smooth");
  }
  AtomCheckOptions opt;
  opt.radius = a.radius > 0.0 ? a.radius : cap_radius(a.lambda);
  opt.threshold = a.threshold;
  opt.tolerance = a.tol;
  const AtomReport rep = cc_atom_check(u, c.n, spec, opt, transform);
  o.params = {{"lambda", a.lambda}, {"family", a.family}, {"mass", a.mass},
              {"radius", opt.radius}, {"threshold", a.threshold}, {"tol", a.tol}};
  o.results = rep.to_json();
  const double s_sph = sharp_constant_sphere(c.n);
  json sph = json::array();
  bool all = true;
  for (const auto& at : rep.atoms) {
    const double bound = s_sph * at.sigma * (1.0 + a.tol);
    sph.push_back({{"bound", bound}, {"holds", at.lhs <= bound}});
    all = all && at.lhs <= bound;
  }
  o.results["sphere_normalized"] = {{"constant", s_sph}, {"atoms", sph}, {"all_hold", all}};
  return o;
}

// ---- integrate ---------------------------------------------------------------

struct IntegrateArgs {
  std::vector<int> monomial;
  double jacobian = 0.0;
  std::vector<double> xi;
};

Outcome cmd_integrate(const Common& c, const IntegrateArgs& a) {
  Outcome o;
  const QuadratureSpec spec = quad(c);
  const int dim = 4 * c.n + 4;
  if (a.jacobian != 0.0) {
    check_lambda(a.jacobian);
    const SpherePoint xi = point_or_north(a.xi, c.n);
    const Automorphism g = Automorphism::dilation(a.jacobian, xi);
    const McEstimate est =
        integrate_mc([&g](const Eigen::VectorXd& z) { return jacobian(g, z); }, spec, dim);
    const double area = sphere_area_qc(c.n);
    o.params = {{"jacobian_lambda", a.jacobian}, {"xi", to_std(xi.x())}};
    o.results = {{"estimate", est.value},
                 {"std_error", est.std_error},
                 {"exact", area},
                 {"z_score", (est.value - area) / est.std_error}};
    return o;
  }
  std::vector<int> alpha = a.monomial;
  if (alpha.empty()) {
    alpha.assign(dim, 0);
    alpha[0] = 2;
  }
  if (static_cast<int>(alpha.size()) != dim)
    throw ValidationError("--monomial needs 4n+4 = " + std::to_string(dim) + " exponents");
  for (int e : alpha)
    if (e < 0) throw ValidationError("--monomial exponents must be >= 0");
  const RealPolynomial poly = RealPolynomial::monomial(alpha);
  const McEstimate est = integrate_mc([&poly](const Eigen::VectorXd& z) { return poly.evaluate(z); },
                                      spec, dim);
  const double exact = monomial_integral(alpha);
  o.params = {{"monomial", alpha}};
  o.results = {{"estimate", est.value},
               {"std_error", est.std_error},
               {"exact", exact},
               {"z_score", est.std_error > 0.0 ? (est.value - exact) / est.std_error : 0.0}};
  return o;
}

// ---- check -------------------------------------------------------------------

Eigen::VectorXd random_sphere(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x[i] = normal(rng);
  return x.normalized();
}

Outcome cmd_check(const Common& c) {
  Outcome o;
  const int n = c.n;
  const int dim = 4 * n + 4;
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.1, 3.0);
  json checks = json::array();

  double roundtrip = 0.0, unit = 0.0, north_err = 0.0;
  for (int s = 0; s < 10000; ++s) {
    QVector q(n);
    for (int i = 0; i < 4 * n; ++i) q.coords()[i] = normal(rng);
    const GroupPoint g(q, Quaternion{0.0, normal(rng), normal(rng), normal(rng)});
    const SpherePoint z = cayley(g);
    unit = std::max(unit, std::abs(z.x().norm() - 1.0));
    const GroupPoint back = cayley_inv(z);
    roundtrip = std::max(roundtrip, (back.q().coords() - g.q().coords()).norm() +
                                        (back.omega() - g.omega()).norm());
  }
  for (int s = 0; s < 10000; ++s) {
    const Eigen::VectorXd z = random_sphere(rng, dim);
    if (quat_at(z, n).a < -0.9) continue;
    const double lambda = unif(rng);
    const GroupPoint g = dilate(lambda, cayley_inv(SpherePoint(z)));
    north_err = std::max(north_err, (gamma_north(lambda, z) - cayley(g).x()).norm());
  }
  checks.push_back(check_entry("cayley_roundtrip", roundtrip, 1e-10));
  checks.push_back(check_entry("cayley_unit_norm", unit, 1e-12));
  checks.push_back(check_entry("gamma_north_vs_composition", north_err, 1e-10));

  double law = 0.0, fixed = 0.0, cocycle = 0.0, closed = 0.0;
  for (int s = 0; s < 200; ++s) {
    const SpherePoint xi(random_sphere(rng, dim));
    const Eigen::VectorXd z = random_sphere(rng, dim);
    const Automorphism a = Automorphism::dilation(0.5, xi);
    const Automorphism b = Automorphism::dilation(0.25, xi);
    law = std::max(law, (a.apply(b.apply(z)) - Automorphism::dilation(0.125, xi).apply(z)).norm());
    fixed = std::max(fixed, (a.apply(xi.x()) - xi.x()).norm());
    fixed = std::max(fixed, (a.apply(-xi.x()) + xi.x()).norm());
    if (s < 50) {
      const SpherePoint eta(random_sphere(rng, dim));
      const Automorphism phi = Automorphism::dilation(unif(rng), eta);
      const Automorphism ab = Automorphism::compose(phi, a);
      const double lhs = jacobian(ab, z);
      const double rhs = jacobian(phi, a.apply(z)) * jacobian(a, z);
      cocycle = std::max(cocycle, std::abs(lhs - rhs) / rhs);
      closed = std::max(closed, std::abs(jacobian(a, z) - a.conformal_jacobian(z)) /
                                    a.conformal_jacobian(z));
    }
  }
  checks.push_back(check_entry("gamma_composition_law", law, 1e-10));
  checks.push_back(check_entry("gamma_fixed_points", fixed, 1e-10));
  checks.push_back(check_entry("jacobian_cocycle_relative", cocycle, 1e-6));
  checks.push_back(check_entry("jacobian_closed_form_relative", closed, 1e-6));

  // Harmonic x_1 x_2 ... x_k has eigenvalue -k(k + dim - 2).
  double eig = 0.0;
  for (int k = 0; k <= 3; ++k) {
    Exponent e(dim, 0);
    for (int v = 0; v < k; ++v) e[v] = 1;
    const EigenCheck ec = laplacian_eigen_check(RealPolynomial::monomial(e), {200, c.seed, 64});
    eig = std::max(eig, std::abs(ec.eigenvalue - ec.expected));
  }
  checks.push_back(check_entry("laplacian_eigenvalues", eig, 1e-6));

  double vert = 0.0, ortho = 0.0;
  const SphereFunction f = [](const Eigen::VectorXd& x) {
    return x[0] * x[1] + 0.3 * x[2] * x[2] * x[3] - x[x.size() - 1] + 0.2 * x[1] * x[x.size() - 2];
  };
  for (int s = 0; s < 50; ++s) {
    const Eigen::VectorXd z = random_sphere(rng, dim);
    for (Axis ax : {Axis::i, Axis::j, Axis::k})
      vert = std::max(vert, std::abs(vertical_derivative(f, z, ax) -
                                     vertical_flow_derivative(f, z, ax)));
    const TangentFrame fr = tangent_frame(z);
    Eigen::MatrixXd all(dim, dim);
    all.col(0) = z;
    all.rightCols(dim - 1) = fr.all();
    ortho = std::max(ortho, (all.transpose() * all - Eigen::MatrixXd::Identity(dim, dim))
                                .cwiseAbs()
                                .maxCoeff());
  }
  checks.push_back(check_entry("vertical_formula_vs_flow", vert, 1e-6));
  checks.push_back(check_entry("frame_orthonormality", ortho, 1e-10));

  bool all_pass = true;
  for (const auto& ch : checks) all_pass = all_pass && ch["passed"].get<bool>();
  o.params = json::object();
  o.results = {{"checks", checks}, {"all_passed", all_pass}};
  if (!all_pass) o.code = kValidation;
  return o;
}

void write_csv(const std::string& path, const CsvTable& t) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot open --csv path " + path);
  for (std::size_t i = 0; i < t.header.size(); ++i) f << (i ? "," : "") << t.header[i];
  f << "\n" << std::setprecision(17);
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
    f << "\n";
  }
}

int thread_cap(const Common& c) {
  if (c.threads > 0) return c.threads;
  if (const char* env = std::getenv("THREADS")) {
    try {
      return std::max(0, std::stoi(env));
    } catch (const std::exception&) {
      return 0;
    }
  }
  return 0;
}

}  // namespace

std::string dump_record(const nlohmann::json& record) { return record.dump(2) + "\n"; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qcsphere: numerics for sharp Sobolev constants on the quaternionic sphere"};
  app.name("qcsphere");
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all");

  Common common;
  ThetaArgs ta;
  CenterArgs ca;
  QuotientArgs qa;
  BubblesArgs ba;
  CcArgs cca;
  IntegrateArgs ia;

  auto* theta = app.add_subcommand("theta", "minimal sum of nu_i^theta under moment constraints");
  add_common(theta, common);
  theta->add_option("--ell", ta.ell, "total degree of the constraints");
  theta->add_option("--jk", ta.jk, "bidegree constraints j,k")->delimiter(',');
  theta->add_option("--theta", ta.theta, "exponent in (0,1]");
  theta->add_option("--N", ta.big_n, "ambient dimension");
  theta->add_option("--support-max", ta.support_max, "largest support size scanned (0 = 3N)");
  theta->add_option("--seeds", ta.seeds, "random starts per support size");
  theta->add_flag("--trace", ta.trace, "include the per-start trace");

  auto* center = app.add_subcommand("center", "find the centering automorphism of a density");
  add_common(center, common);
  center->add_option("--density", ca.density, "uniform | bubble | two-bubble");
  center->add_option("--lambda", ca.lambda, "bubble scale");
  center->add_option("--mass", ca.mass, "two-bubble mass at N");
  center->add_option("--xi0", ca.xi0, "bubble center (4n+4 coordinates)")->delimiter(',');
  center->add_option("--r", ca.r, "exponent r (default p*)");
  center->add_option("--tol", ca.tol, "tolerance on |F|");

  auto* quotient = app.add_subcommand("quotient", "Sobolev quotient of bubble profiles");
  add_common(quotient, common);
  quotient->add_option("--bubble", qa.bubble, "single scale lambda");
  quotient->add_option("--lambdas", qa.lambdas, "scale grid, extrapolated to 0")->delimiter(',');
  quotient->add_option("--mass", qa.mass, "mass at N (1 = single bubble)");
  quotient->add_option("--profile", qa.profile, "bubble | constant");

  auto* bubbles = app.add_subcommand("bubbles", "single versus two-bubble quotient table");
  add_common(bubbles, common);
  bubbles->add_option("--lambdas", ba.lambdas, "scale grid")->delimiter(',');
  bubbles->add_option("--mass", ba.mass, "mass at N of the pair");

  auto* cc = app.add_subcommand("cc", "atomic concentration inequality");
  add_common(cc, common);
  cc->add_option("--lambda", cca.lambda, "bubble scale");
  cc->add_option("--family", cca.family, "single | two | smooth");
  cc->add_option("--mass", cca.mass, "mass at N for the two-bubble family");
  cc->add_option("--radius", cca.radius, "cap radius (default min(0.5, 10 lambda))");
  cc->add_option("--threshold", cca.threshold, "minimum atom mass");
  cc->add_option("--tol", cca.tol, "relative slack in the inequality");

  auto* integrate = app.add_subcommand("integrate", "Monte-Carlo integration checks");
  add_common(integrate, common);
  integrate->add_option("--monomial", ia.monomial, "exponents of a monomial")->delimiter(',');
  integrate->add_option("--jacobian", ia.jacobian, "integrate |J| of Gamma_{lambda,xi}");
  integrate->add_option("--xi", ia.xi, "center for --jacobian")->delimiter(',');

  auto* check = app.add_subcommand("check", "invariant self-test suite");
  add_common(check, common);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  set_thread_limit(thread_cap(common));
  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  CsvTable csv;
  try {
    if (name == "theta")
      o = cmd_theta(common, ta, sub->count("--n") > 0, sub->count("--N") > 0);
    else if (name == "center")
      o = cmd_center(common, ca);
    else if (name == "quotient")
      o = cmd_quotient(common, qa, csv);
    else if (name == "bubbles")
      o = cmd_bubbles(common, ba, csv);
    else if (name == "cc")
      o = cmd_cc(common, cca);
    else if (name == "integrate")
      o = cmd_integrate(common, ia);
    else
      o = cmd_check(common);
    if (!common.csv.empty()) {
      if (csv.header.empty()) throw ValidationError("--csv is only available for quotient and bubbles");
      write_csv(common.csv, csv);
    }
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kValidation;
  } catch (const ConvergenceError& e) {
    err << "non-convergence: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();

  json params = o.params;
  params["n"] = common.n;
  params["p"] = common.p;
  params["samples"] = common.samples;
  const json record = {{"schema_version", kSchemaVersion},
                       {"version", kVersion},
                       {"command", name},
                       {"params", params},
                       {"results", o.results},
                       {"seed", common.seed},
                       {"runtime_ms", ms}};
  if (!common.out.empty()) {
    std::ofstream f(common.out);
    if (!f) {
      err << "validation error: cannot open --out path " << common.out << "\n";
      return kValidation;
    }
    f << dump_record(record);
  } else {
    out << dump_record(record);
  }
  return o.code;
}

}  // namespace qcs::cli
