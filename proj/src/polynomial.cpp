#include "qcs/polynomial.hpp"

#include "qcs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcs {

int total_degree(const Exponent& e) {
  int s = 0;
  for (int v : e) s += v;
  return s;
}

namespace {

void append_degree(int dim, int degree, int var, Exponent& cur, std::vector<Exponent>& out) {
  if (var == dim - 1) {
    cur[var] = degree;
    out.push_back(cur);
    cur[var] = 0;
    return;
  }
  for (int e = degree; e >= 0; --e) {
    cur[var] = e;
    append_degree(dim, degree - e, var + 1, cur, out);
  }
  cur[var] = 0;
}

void check_dims(int a, int b) {
  if (a != b) throw std::invalid_argument("polynomial: dimension mismatch");
}

}  // namespace

std::vector<Exponent> exponents_up_to(int dim, int max_degree) {
  std::vector<Exponent> out;
  Exponent cur(dim, 0);
  for (int deg = 0; deg <= max_degree; ++deg) append_degree(dim, deg, 0, cur, out);
  return out;
}

// --- RealPolynomial ---------------------------------------------------------

RealPolynomial RealPolynomial::constant(int dim, double c) {
  RealPolynomial p(dim);
  p.add_term(Exponent(dim, 0), c);
  return p;
}

RealPolynomial RealPolynomial::monomial(Exponent e, double coeff) {
  RealPolynomial p(static_cast<int>(e.size()));
  p.add_term(e, coeff);
  return p;
}

RealPolynomial RealPolynomial::variable(int dim, int index) {
  Exponent e(dim, 0);
  e[index] = 1;
  return monomial(e);
}

void RealPolynomial::add_term(const Exponent& e, double coeff) {
  check_dims(static_cast<int>(e.size()), dim_);
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

bool RealPolynomial::is_zero(double tol) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [tol](const auto& t) { return std::abs(t.second) <= tol; });
}

int RealPolynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
  return d;
}

bool RealPolynomial::is_homogeneous() const {
  if (terms_.empty()) return true;
  const int d = total_degree(terms_.begin()->first);
  return std::all_of(terms_.begin(), terms_.end(),
                     [d](const auto& t) { return total_degree(t.first) == d; });
}

double RealPolynomial::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double acc = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (int v = 0; v < dim_; ++v)
      for (int p = 0; p < e[v]; ++p) m *= x[v];
    acc += m;
  }
  return acc;
}

RealPolynomial RealPolynomial::derivative(int var) const {
  RealPolynomial out(dim_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponent f = e;
    f[var] -= 1;
    out.add_term(f, c * e[var]);
  }
  return out;
}

RealPolynomial RealPolynomial::laplacian() const {
  RealPolynomial out(dim_);
  for (int v = 0; v < dim_; ++v) out = out + derivative(v).derivative(v);
  return out;
}

double RealPolynomial::sphere_integral() const {
  double acc = 0.0;
  for (const auto& [e, c] : terms_) acc += c * monomial_integral(e);
  return acc;
}

RealPolynomial RealPolynomial::operator+(const RealPolynomial& o) const {
  check_dims(dim_, o.dim_);
  RealPolynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, c);
  return out;
}

RealPolynomial RealPolynomial::operator-(const RealPolynomial& o) const { return *this + o * -1.0; }

RealPolynomial RealPolynomial::operator*(const RealPolynomial& o) const {
  check_dims(dim_, o.dim_);
  RealPolynomial out(dim_);
  for (const auto& [e1, c1] : terms_) {
    for (const auto& [e2, c2] : o.terms_) {
      Exponent e(dim_);
      for (int v = 0; v < dim_; ++v) e[v] = e1[v] + e2[v];
      out.add_term(e, c1 * c2);
    }
  }
  return out;
}

RealPolynomial RealPolynomial::operator*(double s) const {
  RealPolynomial out(dim_);
  for (const auto& [e, c] : terms_) out.add_term(e, c * s);
  return out;
}

// --- ComplexPolynomial ------------------------------------------------------

ComplexPolynomial ComplexPolynomial::constant(int dim, std::complex<double> c) {
  ComplexPolynomial p(dim);
  p.add_term(Exponent(dim, 0), c);
  return p;
}

ComplexPolynomial ComplexPolynomial::complex_variable(int dim, int re_index, int im_index) {
  ComplexPolynomial p(dim);
  Exponent e(dim, 0);
  e[re_index] = 1;
  p.add_term(e, 1.0);
  e[re_index] = 0;
  e[im_index] = 1;
  p.add_term(e, {0.0, 1.0});
  return p;
}

void ComplexPolynomial::add_term(const Exponent& e, std::complex<double> coeff) {
  check_dims(static_cast<int>(e.size()), dim_);
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

ComplexPolynomial ComplexPolynomial::operator*(const ComplexPolynomial& o) const {
  check_dims(dim_, o.dim_);
  ComplexPolynomial out(dim_);
  for (const auto& [e1, c1] : terms_) {
    for (const auto& [e2, c2] : o.terms_) {
      Exponent e(dim_);
      for (int v = 0; v < dim_; ++v) e[v] = e1[v] + e2[v];
      out.add_term(e, c1 * c2);
    }
  }
  return out;
}

ComplexPolynomial ComplexPolynomial::conj() const {
  ComplexPolynomial out(dim_);
  for (const auto& [e, c] : terms_) out.add_term(e, std::conj(c));
  return out;
}

std::complex<double> ComplexPolynomial::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::complex<double> acc = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = 1.0;
    for (int v = 0; v < dim_; ++v)
      for (int p = 0; p < e[v]; ++p) m *= x[v];
    acc += c * m;
  }
  return acc;
}

RealPolynomial ComplexPolynomial::real_part() const {
  RealPolynomial out(dim_);
  for (const auto& [e, c] : terms_) out.add_term(e, c.real());
  return out;
}

RealPolynomial ComplexPolynomial::imag_part() const {
  RealPolynomial out(dim_);
  for (const auto& [e, c] : terms_) out.add_term(e, c.imag());
  return out;
}

// --- MonomialTable ----------------------------------------------------------

MonomialTable::MonomialTable(std::vector<Exponent> exponents) : exps_(std::move(exponents)) {
  if (!exps_.empty()) dim_ = static_cast<int>(exps_.front().size());
  for (const auto& e : exps_) {
    check_dims(static_cast<int>(e.size()), dim_);
    for (int v : e) max_exp_ = std::max(max_exp_, v);
  }
}

void MonomialTable::values(const Eigen::Ref<const Eigen::VectorXd>& x,
                           Eigen::Ref<Eigen::VectorXd> out) const {
  // powers(v, p) = x_v^p
  Eigen::MatrixXd powers(dim_, max_exp_ + 1);
  for (int v = 0; v < dim_; ++v) {
    powers(v, 0) = 1.0;
    for (int p = 1; p <= max_exp_; ++p) powers(v, p) = powers(v, p - 1) * x[v];
  }
  for (int m = 0; m < size(); ++m) {
    double val = 1.0;
    const Exponent& e = exps_[m];
    for (int v = 0; v < dim_; ++v) val *= powers(v, e[v]);
    out[m] = val;
  }
}

void MonomialTable::gradients(const Eigen::Ref<const Eigen::VectorXd>& x,
                              Eigen::Ref<Eigen::MatrixXd> out) const {
  Eigen::MatrixXd powers(dim_, max_exp_ + 1);
  for (int v = 0; v < dim_; ++v) {
    powers(v, 0) = 1.0;
    for (int p = 1; p <= max_exp_; ++p) powers(v, p) = powers(v, p - 1) * x[v];
  }
  for (int m = 0; m < size(); ++m) {
    const Exponent& e = exps_[m];
    for (int g = 0; g < dim_; ++g) {
      if (e[g] == 0) {
        out(m, g) = 0.0;
        continue;
      }
      double val = e[g] * powers(g, e[g] - 1);
      for (int v = 0; v < dim_; ++v)
        if (v != g) val *= powers(v, e[v]);
      out(m, g) = val;
    }
  }
}

}  // namespace qcs
