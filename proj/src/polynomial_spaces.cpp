#include "qcs/polynomial_spaces.hpp"

#include "qcs/quadrature.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace qcs {

namespace {

std::vector<Exponent> exponents_of_degree(int dim, int degree) {
  std::vector<Exponent> all = exponents_up_to(dim, degree);
  std::vector<Exponent> out;
  for (auto& e : all)
    if (total_degree(e) == degree) out.push_back(std::move(e));
  return out;
}

void exponent_sum(const Exponent& a, const Exponent& b, Exponent& scratch) {
  for (std::size_t v = 0; v < a.size(); ++v) scratch[v] = a[v] + b[v];
}

// Exact Gram matrix of a monomial list over S^{D-1}.
Eigen::MatrixXd monomial_gram(const std::vector<Exponent>& mons) {
  const int m = static_cast<int>(mons.size());
  Eigen::MatrixXd g(m, m);
  Exponent scratch(mons.empty() ? 0 : mons.front().size());
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      exponent_sum(mons[a], mons[b], scratch);
      g(a, b) = g(b, a) = monomial_integral(scratch);
    }
  }
  return g;
}

// Coefficient matrix of `functions` over the union of their monomials.
std::pair<std::vector<Exponent>, Eigen::MatrixXd> coefficient_matrix(
    const std::vector<RealPolynomial>& functions, bool include_constant, int dim) {
  std::set<Exponent> uniq;
  if (include_constant) uniq.insert(Exponent(dim, 0));
  for (const auto& f : functions)
    for (const auto& [e, c] : f.terms()) uniq.insert(e);
  std::vector<Exponent> mons(uniq.begin(), uniq.end());
  std::stable_sort(mons.begin(), mons.end(), [](const Exponent& a, const Exponent& b) {
    return total_degree(a) < total_degree(b);
  });
  std::map<Exponent, int> index;
  for (int a = 0; a < static_cast<int>(mons.size()); ++a) index[mons[a]] = a;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(functions.size()),
                                            static_cast<Eigen::Index>(mons.size()));
  for (std::size_t r = 0; r < functions.size(); ++r)
    for (const auto& [e, c] : functions[r].terms()) p(static_cast<Eigen::Index>(r), index[e]) = c;
  return {std::move(mons), std::move(p)};
}

}  // namespace

ComplexPolynomial complex_coordinate(int n, int c) {
  const int dim = 4 * n + 4;
  if (c < 0 || c > 2 * n + 1) throw std::out_of_range("complex_coordinate: index");
  if (c <= n) return ComplexPolynomial::complex_variable(dim, 4 * c, 4 * c + 1);
  const int l = c - (n + 1);
  return ComplexPolynomial::complex_variable(dim, 4 * l + 2, 4 * l + 3);
}

ComplexPolynomial BidegreeBasis::polynomial(std::size_t m) const {
  const int dim = 4 * n + 4;
  ComplexPolynomial p = ComplexPolynomial::constant(dim, 1.0);
  const auto& [alpha, beta] = monomials.at(m);
  for (int c = 0; c < 2 * n + 2; ++c) {
    const ComplexPolynomial z = complex_coordinate(n, c);
    const ComplexPolynomial zbar = z.conj();
    for (int e = 0; e < alpha[c]; ++e) p = p * z;
    for (int e = 0; e < beta[c]; ++e) p = p * zbar;
  }
  return p;
}

BidegreeBasis enumerate_bidegree(int j, int k, int n) {
  if (j < 0 || k < 0 || n < 0) throw std::invalid_argument("enumerate_bidegree: negative index");
  BidegreeBasis basis{j, k, n, {}};
  const int cdim = 2 * n + 2;
  for (const auto& alpha : exponents_of_degree(cdim, j))
    for (const auto& beta : exponents_of_degree(cdim, k)) basis.monomials.emplace_back(alpha, beta);
  return basis;
}

RealPolyBasis enumerate_real(int ell, int dim) {
  if (ell < 0 || dim < 1) throw std::invalid_argument("enumerate_real: bad arguments");
  return {ell, dim, exponents_up_to(dim, ell)};
}

int restricted_span_dimension(const std::vector<RealPolynomial>& functions, double rank_tol) {
  if (functions.empty()) return 0;
  const int dim = functions.front().dim();
  auto [mons, p] = coefficient_matrix(functions, false, dim);
  const Eigen::MatrixXd gram = p * monomial_gram(mons) * p.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  if (top <= 0.0) return 0;
  return static_cast<int>((ev.array() > rank_tol * top).count());
}

std::vector<RealPolynomial> cumulative_bidegree_functions(int j, int k, int n) {
  std::vector<RealPolynomial> out;
  for (int jj = 0; jj <= j; ++jj) {
    for (int kk = 0; kk <= k; ++kk) {
      const BidegreeBasis b = enumerate_bidegree(jj, kk, n);
      for (std::size_t m = 0; m < b.count(); ++m) {
        const ComplexPolynomial g = b.polynomial(m);
        RealPolynomial re = g.real_part();
        RealPolynomial im = g.imag_part();
        if (!re.is_zero()) out.push_back(std::move(re));
        if (!im.is_zero()) out.push_back(std::move(im));
      }
    }
  }
  return out;
}

std::string ConstraintSpec::label() const {
  if (kind == Kind::degree) return "ell=" + std::to_string(ell) + ",N=" + std::to_string(dim);
  return "jk=" + std::to_string(j) + "," + std::to_string(k) + ",n=" + std::to_string(n());
}

ConstraintSet::ConstraintSet(ConstraintSpec spec, std::vector<Exponent> monomials,
                             Eigen::MatrixXd coeffs)
    : spec_(spec), table_(monomials), coeffs_(std::move(coeffs)) {
  gram_ = coeffs_ * monomial_gram(monomials) * coeffs_.transpose();
}

Eigen::VectorXd ConstraintSet::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd m(table_.size());
  table_.values(x, m);
  return coeffs_ * m;
}

Eigen::MatrixXd ConstraintSet::jacobian(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::MatrixXd g(table_.size(), table_.dim());
  table_.gradients(x, g);
  return coeffs_ * g;
}

RealPolynomial ConstraintSet::member(int m) const {
  RealPolynomial p(dim());
  for (int a = 0; a < table_.size(); ++a) p.add_term(table_.exponents()[a], coeffs_(m, a));
  return p;
}

nlohmann::json ConstraintSet::to_json() const {
  nlohmann::json j;
  j["kind"] = spec_.kind == ConstraintSpec::Kind::degree ? "degree" : "bidegree";
  if (spec_.kind == ConstraintSpec::Kind::degree) {
    j["ell"] = spec_.ell;
  } else {
    j["j"] = spec_.j;
    j["k"] = spec_.k;
    j["n"] = spec_.n();
  }
  j["dim"] = spec_.dim;
  j["dimension"] = size();
  j["monomials"] = table_.exponents();
  std::vector<std::vector<double>> rows(size(), std::vector<double>(coeffs_.cols()));
  for (int m = 0; m < size(); ++m) {
    for (Eigen::Index a = 0; a < coeffs_.cols(); ++a) rows[m][a] = coeffs_(m, a);
  }
  j["coefficients"] = rows;
  return j;
}

ConstraintSet mean_zero_constraints(const ConstraintSpec& spec, double rank_tol) {
  const int dim = spec.dim;
  std::vector<RealPolynomial> functions;
  if (spec.kind == ConstraintSpec::Kind::degree) {
    if (spec.ell < 0) throw std::invalid_argument("mean_zero_constraints: ell < 0");
    for (auto& e : exponents_up_to(dim, spec.ell)) functions.push_back(RealPolynomial::monomial(e));
  } else {
    if (dim % 4 != 0) throw std::invalid_argument("mean_zero_constraints: dim must be 4n+4");
    functions = cumulative_bidegree_functions(spec.j, spec.k, spec.n());
  }
  auto [mons, p] = coefficient_matrix(functions, true, dim);
  const Eigen::MatrixXd gmono = monomial_gram(mons);
  Eigen::VectorXd mono_mean(static_cast<Eigen::Index>(mons.size()));
  for (std::size_t a = 0; a < mons.size(); ++a) mono_mean[static_cast<Eigen::Index>(a)] = monomial_integral(mons[a]);

  const double area = sphere_area(dim);
  const Eigen::VectorXd mu = p * mono_mean;
  const Eigen::MatrixXd centered = p * gmono * p.transpose() - mu * mu.transpose() / area;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(centered);
  const Eigen::VectorXd ev = es.eigenvalues();
  const Eigen::MatrixXd vecs = es.eigenvectors();
  const double top = ev.size() > 0 ? ev.maxCoeff() : 0.0;

  // Keep eigenvalues above the cutoff, largest first.
  std::vector<int> keep;
  for (Eigen::Index r = ev.size() - 1; r >= 0; --r)
    if (top > 0.0 && ev[r] > rank_tol * top) keep.push_back(static_cast<int>(r));

  const int constant_index = 0;  // the zero exponent sorts first
  Eigen::MatrixXd coeffs(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(mons.size()));
  for (std::size_t m = 0; m < keep.size(); ++m) {
    Eigen::VectorXd v = vecs.col(keep[m]);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    const double scale = 1.0 / std::sqrt(ev[keep[m]]);
    Eigen::RowVectorXd row = scale * (v.transpose() * p);
    row[constant_index] -= scale * v.dot(mu) / area;
    coeffs.row(static_cast<Eigen::Index>(m)) = row;
  }
  return ConstraintSet(spec, std::move(mons), std::move(coeffs));
}

Eigen::MatrixXd cross_gram(const ConstraintSet& a, const ConstraintSet& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("cross_gram: dimension mismatch");
  const auto& ea = a.table().exponents();
  const auto& eb = b.table().exponents();
  Eigen::MatrixXd mg(static_cast<Eigen::Index>(ea.size()), static_cast<Eigen::Index>(eb.size()));
  Exponent scratch(a.dim());
  for (std::size_t r = 0; r < ea.size(); ++r) {
    for (std::size_t s = 0; s < eb.size(); ++s) {
      for (int v = 0; v < a.dim(); ++v) scratch[v] = ea[r][v] + eb[s][v];
      mg(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) = monomial_integral(scratch);
    }
  }
  return a.coefficients() * mg * b.coefficients().transpose();
}

Eigen::VectorXd moment_vector(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights,
                              const ConstraintSet& c) {
  if (points.cols() != weights.size() || points.rows() != c.dim())
    throw std::invalid_argument("moment_vector: shape mismatch");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(c.table().size());
  Eigen::VectorXd m(c.table().size());
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    c.table().values(points.col(i), m);
    acc += weights[i] * m;
  }
  return c.coefficients() * acc;
}

Eigen::VectorXd moment_vector(const AtomicMeasure& nu, const ConstraintSet& c) {
  return moment_vector(nu.points, nu.weights, c);
}

}  // namespace qcs
