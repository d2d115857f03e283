#include "qcs/theta.hpp"

#include "qcs/errors.hpp"
#include "qcs/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace qcs {

namespace {

void check_theta(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw ValidationError("theta must lie in (0, 1]");
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Vertices of the regular simplex in R^d (d+1 unit columns), via the Helmert
// basis of the hyperplane orthogonal to (1, ..., 1) in R^{d+1}.
Eigen::MatrixXd simplex_vertices(int d) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d, d + 1);
  for (int k = 1; k <= d; ++k) {
    const double s = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int i = 0; i < k; ++i) v(k - 1, i) = s;
    v(k - 1, k) = -k * s;
  }
  for (int i = 0; i <= d; ++i) v.col(i).normalize();
  return v;
}

AtomicMeasure equal_weights(Eigen::MatrixXd points) {
  const auto m = points.cols();
  return {std::move(points), Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m))};
}

}  // namespace

double theta_objective(const AtomicMeasure& nu, double theta) {
  check_theta(theta);
  double acc = 0.0;
  for (int i = 0; i < nu.size(); ++i)
    if (nu.weights[i] > 0.0) acc += std::pow(nu.weights[i], theta);
  return acc;
}

double feasibility(const AtomicMeasure& nu, const ConstraintSet& c) {
  if (nu.size() == 0 || c.size() == 0) return 0.0;
  return moment_vector(nu, c).cwiseAbs().maxCoeff();
}

std::string to_string(Candidate c) {
  switch (c) {
    case Candidate::antipodal: return "antipodal";
    case Candidate::simplex: return "simplex";
    case Candidate::cross_polytope: return "cross-polytope";
    case Candidate::real_simplex: return "real-simplex";
  }
  return "unknown";
}

Candidate candidate_from_string(const std::string& s) {
  if (s == "antipodal") return Candidate::antipodal;
  if (s == "simplex") return Candidate::simplex;
  if (s == "cross-polytope" || s == "cross_polytope") return Candidate::cross_polytope;
  if (s == "real-simplex" || s == "real_simplex") return Candidate::real_simplex;
  throw ValidationError("unknown candidate '" + s + "'");
}

AtomicMeasure candidate_measure(Candidate c, int dim) {
  if (dim < 2) throw ValidationError("candidate_measure: dimension must be >= 2");
  switch (c) {
    case Candidate::antipodal: {
      Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, 2);
      p(0, 0) = 1.0;
      p(0, 1) = -1.0;
      return equal_weights(std::move(p));
    }
    case Candidate::simplex: return equal_weights(simplex_vertices(dim));
    case Candidate::cross_polytope: {
      Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, 2 * dim);
      for (int i = 0; i < dim; ++i) {
        p(i, 2 * i) = 1.0;
        p(i, 2 * i + 1) = -1.0;
      }
      return equal_weights(std::move(p));
    }
    case Candidate::real_simplex: {
      if (dim % 4 != 0) throw ValidationError("real_simplex needs dim = 4n+4");
      const int half = dim / 2;
      const Eigen::MatrixXd s = simplex_vertices(half);
      Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, half + 1);
      // Real parts of z_l and w_l sit at coordinates 4l and 4l+2.
      for (int r = 0; r < half; ++r) p.row(4 * (r / 2) + 2 * (r % 2)) = s.row(r);
      return equal_weights(std::move(p));
    }
  }
  throw ValidationError("candidate_measure: unknown candidate");
}

int minimum_support(const ConstraintSpec& spec) {
  if (spec.kind == ConstraintSpec::Kind::bidegree) return 2;
  const int n = spec.dim;
  const int e = spec.ell / 2;
  if (spec.ell <= 0) return 1;
  if (spec.ell % 2 == 0)
    return static_cast<int>(binomial(n + e - 1, n - 1) + binomial(n + e - 2, n - 1));
  return static_cast<int>(2.0 * binomial(n + e - 1, n - 1));
}

nlohmann::json ThetaResult::to_json(bool include_trace) const {
  nlohmann::json j;
  j["label"] = label;
  j["theta"] = theta;
  j["value"] = value;
  j["feasible"] = feasible;
  j["constraint_residual"] = constraint_residual;
  j["support_size"] = support_size;
  j["exploratory"] = exploratory;
  j["warm_start"] = warm_start;
  j["warm_start_value"] = warm_start_value;
  j["warm_start_beaten"] = warm_start_beaten;
  nlohmann::json atoms = nlohmann::json::array();
  for (int i = 0; i < measure.size(); ++i) {
    const auto col = measure.points.col(i);
    atoms.push_back({{"weight", measure.weights[i]},
                     {"point", std::vector<double>(col.data(), col.data() + col.size())}});
  }
  j["atoms"] = atoms;
  if (!report.empty()) j["report"] = report;
  if (include_trace) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& e : trace)
      t.push_back({{"start", e.start},
                   {"support_size", e.support_size},
                   {"value", e.value},
                   {"residual", e.residual},
                   {"feasible", e.feasible},
                   {"vertex", e.vertex},
                   {"iterations", e.iterations}});
    j["trace"] = t;
  }
  return j;
}

ThetaResult certify_candidate(const AtomicMeasure& nu, const ConstraintSet& c, double theta,
                              double tol, const std::string& label) {
  check_theta(theta);
  if (nu.dim() != c.dim()) throw ValidationError("certify_candidate: dimension mismatch");
  ThetaResult r;
  r.label = label;
  r.theta = theta;
  r.measure = nu;
  r.value = theta_objective(nu, theta);
  r.constraint_residual = feasibility(nu, c);
  r.support_size = nu.pruned().size();
  r.feasible = nu.is_probability(1e-12) && r.constraint_residual <= tol;
  r.exploratory = c.spec().kind == ConstraintSpec::Kind::bidegree;
  return r;
}

ThetaResult certify_candidate(Candidate cand, const ConstraintSet& c, double theta, double tol) {
  return certify_candidate(candidate_measure(cand, c.dim()), c, theta, tol, to_string(cand));
}

namespace {

// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, tau = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) tau = t;
  }
  return (v.array() - tau).max(0.0).matrix();
}

// Monomial values (M x m) and the penalty ingredients for a configuration.
struct Moments {
  Eigen::MatrixXd values;  ///< M x m
  Eigen::VectorXd s;       ///< K constraint moments
};

Moments moments(const ConstraintSet& c, const Eigen::MatrixXd& x, const Eigen::VectorXd& nu) {
  Moments out{Eigen::MatrixXd(c.table().size(), x.cols()), {}};
  for (Eigen::Index i = 0; i < x.cols(); ++i) c.table().values(x.col(i), out.values.col(i));
  out.s = c.coefficients() * (out.values * nu);
  return out;
}

struct Penalized {
  const ConstraintSet& c;
  double theta;
  double eps;
  double mu;

  double smooth(const Eigen::VectorXd& nu) const {
    const double e0 = std::pow(eps, theta);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < nu.size(); ++i) acc += std::pow(nu[i] + eps, theta) - e0;
    return acc;
  }

  double value(const Eigen::MatrixXd& x, const Eigen::VectorXd& nu) const {
    return smooth(nu) + mu * moments(c, x, nu).s.squaredNorm();
  }

  double gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& nu, Eigen::MatrixXd& gx,
                  Eigen::VectorXd& gnu) const {
    const Moments mo = moments(c, x, nu);
    const Eigen::VectorXd q = c.coefficients().transpose() * mo.s;
    gnu = 2.0 * mu * (mo.values.transpose() * q);
    for (Eigen::Index i = 0; i < nu.size(); ++i) gnu[i] += theta * std::pow(nu[i] + eps, theta - 1.0);
    gx.resize(x.rows(), x.cols());
    Eigen::MatrixXd grad(c.table().size(), x.rows());
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      c.table().gradients(x.col(i), grad);
      Eigen::VectorXd g = 2.0 * mu * nu[i] * (grad.transpose() * q);
      g -= g.dot(x.col(i)) * x.col(i);
      gx.col(i) = g;
    }
    return smooth(nu) + mu * mo.s.squaredNorm();
  }
};

Eigen::MatrixXd normalize_columns(Eigen::MatrixXd x) {
  for (Eigen::Index i = 0; i < x.cols(); ++i) x.col(i).normalize();
  return x;
}

// Projected gradient with Armijo backtracking; returns iterations used.
int penalty_descent(const Penalized& p, Eigen::MatrixXd& x, Eigen::VectorXd& nu, int max_iter) {
  Eigen::MatrixXd gx;
  Eigen::VectorXd gnu;
  double step = 1e-2;
  double f = p.gradient(x, nu, gx, gnu);
  int it = 0;
  for (; it < max_iter; ++it) {
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Eigen::MatrixXd xn = normalize_columns(x - step * gx);
      const Eigen::VectorXd nn = project_simplex(nu - step * gnu);
      const double move = (xn - x).squaredNorm() + (nn - nu).squaredNorm();
      const double fn = p.value(xn, nn);
      if (fn <= f - 1e-4 * move / step) {
        const double gain = f - fn;
        x = xn;
        nu = nn;
        f = p.gradient(x, nu, gx, gnu);
        step *= 2.0;
        accepted = true;
        if (gain <= 1e-14 * std::max(1.0, std::abs(f))) return it + 1;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return it;
}

AtomicMeasure drop_zero_atoms(const Eigen::MatrixXd& x, const Eigen::VectorXd& nu) {
  return AtomicMeasure{x, nu}.pruned(0.0);
}

// Gauss-Newton with minimum-norm steps on (tangent moves, weights) for
// s(x, nu) = 0 and sum nu = 1.
int restore_feasibility(const ConstraintSet& c, AtomicMeasure& m, double target, int max_iter,
                        bool move_points) {
  const int dim = m.dim();
  const int k = c.size();
  Eigen::MatrixXd grad(c.table().size(), dim);
  int it = 0;
  for (; it < max_iter; ++it) {
    const int atoms = m.size();
    const Moments mo = moments(c, m.points, m.weights);
    Eigen::VectorXd r(k + 1);
    r.head(k) = mo.s;
    r[k] = m.weights.sum() - 1.0;
    if (r.cwiseAbs().maxCoeff() <= target) break;

    const int per = move_points ? dim - 1 : 0;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(k + 1, atoms * (per + 1));
    std::vector<Eigen::MatrixXd> frames(atoms);
    for (int i = 0; i < atoms; ++i) {
      jac.block(0, i, k, 1) = c.coefficients() * mo.values.col(i);
      jac(k, i) = 1.0;
      if (!move_points) continue;
      frames[i] = tangent_basis(m.points.col(i));
      c.table().gradients(m.points.col(i), grad);
      jac.block(0, atoms + i * per, k, per) =
          m.weights[i] * (c.coefficients() * (grad * frames[i]));
    }
    const Eigen::VectorXd delta = jac.completeOrthogonalDecomposition().solve(-r);
    if (!delta.allFinite()) break;
    for (int i = 0; i < atoms; ++i) {
      m.weights[i] = std::max(0.0, m.weights[i] + delta[i]);
      if (move_points) {
        m.points.col(i) += frames[i] * delta.segment(atoms + i * per, per);
        m.points.col(i).normalize();
      }
    }
    m = m.pruned(0.0);
    if (m.size() == 0) break;
  }
  return it;
}

bool better(const ThetaResult& a, const ThetaResult& b) {
  const double scale = std::max(1.0, std::abs(b.value));
  if (a.value < b.value - 1e-12 * scale) return true;
  if (a.value > b.value + 1e-12 * scale) return false;
  if (a.support_size != b.support_size) return a.support_size < b.support_size;
  const Eigen::Index na = a.measure.points.size(), nb = b.measure.points.size();
  return std::lexicographical_compare(a.measure.points.data(), a.measure.points.data() + na,
                                      b.measure.points.data(), b.measure.points.data() + nb);
}

}  // namespace

bool polish_weights(const ConstraintSet& c, double theta, AtomicMeasure& nu) {
  nu = nu.pruned(0.0);
  for (int guard = 0; guard <= nu.size() + 1; ++guard) {
    const int atoms = nu.size();
    if (atoms <= 1) return true;
    Eigen::MatrixXd b(c.size() + 1, atoms);
    const Moments mo = moments(c, nu.points, nu.weights);
    b.topRows(c.size()) = c.coefficients() * mo.values;
    b.bottomRows(1).setOnes();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv[i] > 1e-10 * smax ? 1 : 0;
    if (rank >= atoms) return true;
    const Eigen::VectorXd d = svd.matrixV().col(atoms - 1);

    // Largest steps in +d and -d keeping every weight nonnegative.
    double tp = std::numeric_limits<double>::infinity(), tm = tp;
    int ip = -1, im = -1;
    for (int i = 0; i < atoms; ++i) {
      if (d[i] < 0.0 && nu.weights[i] / -d[i] < tp) {
        tp = nu.weights[i] / -d[i];
        ip = i;
      }
      if (d[i] > 0.0 && nu.weights[i] / d[i] < tm) {
        tm = nu.weights[i] / d[i];
        im = i;
      }
    }
    if (ip < 0 && im < 0) return false;
    Eigen::VectorXd wp = nu.weights, wm = nu.weights;
    double fp = std::numeric_limits<double>::infinity(), fm = fp;
    if (ip >= 0) {
      wp += tp * d;
      wp[ip] = 0.0;
      wp = wp.cwiseMax(0.0);
      fp = theta_objective({nu.points, wp}, theta);
    }
    if (im >= 0) {
      wm -= tm * d;
      wm[im] = 0.0;
      wm = wm.cwiseMax(0.0);
      fm = theta_objective({nu.points, wm}, theta);
    }
    nu.weights = fp <= fm ? wp : wm;
    nu.weights /= nu.weights.sum();
    nu = nu.pruned(0.0);
  }
  return false;
}

ThetaTraceEntry refine_measure(const ConstraintSet& c, double theta, AtomicMeasure& nu,
                               const ThetaOptions& opt) {
  check_theta(theta);
  ThetaTraceEntry e;
  Eigen::MatrixXd x = normalize_columns(nu.points);
  Eigen::VectorXd w = project_simplex(nu.weights);
  for (double mu = 1.0; mu <= 1e7; mu *= 10.0) {
    const Penalized p{c, theta, opt.epsilon, mu};
    e.iterations += penalty_descent(p, x, w, opt.stage_iterations);
  }
  nu = drop_zero_atoms(x, w);
  const double target = 1e-2 * opt.feasibility_tol;
  e.iterations += restore_feasibility(c, nu, target, opt.restore_iterations, true);
  e.vertex = polish_weights(c, theta, nu);
  if (feasibility(nu, c) > target) {
    e.iterations += restore_feasibility(c, nu, target, opt.restore_iterations, true);
    e.vertex = polish_weights(c, theta, nu);
  }
  nu.weights /= nu.weights.sum();
  e.residual = feasibility(nu, c);
  e.feasible = nu.size() > 0 && e.residual <= opt.feasibility_tol;
  e.value = theta_objective(nu, theta);
  e.support_size = nu.size();
  return e;
}

ThetaResult solve_theta(const ConstraintSet& c, double theta, const ThetaOptions& opt) {
  check_theta(theta);
  const int dim = c.dim();
  if (dim < 2) throw ValidationError("solve_theta: N must be >= 2");
  if (opt.seeds < 0) throw ValidationError("solve_theta: seeds must be >= 0");

  ThetaResult best;
  best.label = c.spec().label();
  best.theta = theta;
  best.exploratory = c.spec().kind == ConstraintSpec::Kind::bidegree;
  best.value = std::numeric_limits<double>::infinity();

  std::vector<Candidate> cands{Candidate::antipodal, Candidate::simplex, Candidate::cross_polytope};
  if (best.exploratory) cands.push_back(Candidate::real_simplex);
  for (Candidate cand : cands) {
    ThetaResult r = certify_candidate(cand, c, theta, opt.feasibility_tol);
    best.trace.push_back({"candidate:" + to_string(cand), r.support_size, r.value,
                          r.constraint_residual, r.feasible, true, 0});
    if (r.feasible && (best.warm_start.empty() || better(r, best))) {
      best.warm_start = to_string(cand);
      best.warm_start_value = r.value;
      best.value = r.value;
      best.measure = r.measure;
      best.constraint_residual = r.constraint_residual;
      best.support_size = r.support_size;
      best.feasible = true;
    }
  }

  if (theta == 1.0) {
    best.value = 1.0;
    best.feasible = true;
    return best;
  }

  const int m_lo = opt.support_min > 0 ? opt.support_min : minimum_support(c.spec());
  const int m_hi = std::max(m_lo, opt.support_max > 0 ? opt.support_max : 3 * dim);
  struct Task {
    int m;
    int seed;
  };
  std::vector<Task> tasks;
  for (int m = m_lo; m <= m_hi; ++m)
    for (int s = 0; s < opt.seeds; ++s) tasks.push_back({m, s});
  std::vector<ThetaTraceEntry> entries(tasks.size());
  std::vector<AtomicMeasure> measures(tasks.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(tasks.size()); ++t) {
    const Task task = tasks[t];
    std::seed_seq seq{opt.base_seed, static_cast<std::uint64_t>(task.m),
                      static_cast<std::uint64_t>(task.seed)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    AtomicMeasure nu{Eigen::MatrixXd(dim, task.m),
                     Eigen::VectorXd::Constant(task.m, 1.0 / task.m)};
    for (int i = 0; i < task.m; ++i) {
      for (int d = 0; d < dim; ++d) nu.points(d, i) = normal(rng);
      nu.points.col(i).normalize();
    }
    ThetaTraceEntry e = refine_measure(c, theta, nu, opt);
    e.start = "random:m=" + std::to_string(task.m) + ",seed=" + std::to_string(task.seed);
    entries[t] = e;
    measures[t] = std::move(nu);
  }

  double best_random = std::numeric_limits<double>::infinity();
  double best_residual = std::numeric_limits<double>::infinity();
  int best_residual_m = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    best.trace.push_back(entries[t]);
    if (entries[t].residual < best_residual) {
      best_residual = entries[t].residual;
      best_residual_m = tasks[t].m;
    }
    if (!entries[t].feasible) continue;
    ThetaResult r;
    r.value = entries[t].value;
    r.measure = measures[t];
    r.support_size = entries[t].support_size;
    r.constraint_residual = entries[t].residual;
    best_random = std::min(best_random, r.value);
    if (!best.feasible || better(r, best)) {
      best.value = r.value;
      best.measure = r.measure;
      best.support_size = r.support_size;
      best.constraint_residual = r.constraint_residual;
      best.feasible = true;
    }
  }
  best.warm_start_beaten =
      !best.warm_start.empty() && best_random < best.warm_start_value - 1e-9;

  if (!best.feasible) {
    std::ostringstream os;
    os << "no feasible measure for " << best.label << " with support sizes " << m_lo << ".."
       << m_hi << "; best residual " << best_residual << " at support " << best_residual_m;
    best.report = os.str();
  }
  return best;
}

}  // namespace qcs
