#pragma once

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <vector>

namespace qcs {

/// Exponent vector of a monomial in D real variables.
using Exponent = std::vector<int>;

int total_degree(const Exponent& e);

/// All exponents in `dim` variables with total degree <= max_degree, in
/// graded lexicographic order (degree first).
std::vector<Exponent> exponents_up_to(int dim, int max_degree);

/// Sparse real polynomial in D variables.
class RealPolynomial {
 public:
  explicit RealPolynomial(int dim = 0) : dim_(dim) {}

  static RealPolynomial constant(int dim, double c);
  static RealPolynomial monomial(Exponent e, double coeff = 1.0);
  static RealPolynomial variable(int dim, int index);

  int dim() const { return dim_; }
  const std::map<Exponent, double>& terms() const { return terms_; }
  void add_term(const Exponent& e, double coeff);
  bool is_zero(double tol = 0.0) const;

  int degree() const;
  bool is_homogeneous() const;

  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  RealPolynomial derivative(int var) const;
  RealPolynomial laplacian() const;
  /// Exact integral over S^{D-1}.
  double sphere_integral() const;

  RealPolynomial operator+(const RealPolynomial& o) const;
  RealPolynomial operator-(const RealPolynomial& o) const;
  RealPolynomial operator*(const RealPolynomial& o) const;
  RealPolynomial operator*(double s) const;

 private:
  int dim_;
  std::map<Exponent, double> terms_;
};

/// Sparse polynomial with complex coefficients in D real variables.
class ComplexPolynomial {
 public:
  explicit ComplexPolynomial(int dim = 0) : dim_(dim) {}

  static ComplexPolynomial constant(int dim, std::complex<double> c);
  /// x_re + i x_im.
  static ComplexPolynomial complex_variable(int dim, int re_index, int im_index);

  int dim() const { return dim_; }
  const std::map<Exponent, std::complex<double>>& terms() const { return terms_; }
  void add_term(const Exponent& e, std::complex<double> coeff);

  ComplexPolynomial operator*(const ComplexPolynomial& o) const;
  ComplexPolynomial conj() const;

  std::complex<double> evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  RealPolynomial real_part() const;
  RealPolynomial imag_part() const;

 private:
  int dim_;
  std::map<Exponent, std::complex<double>> terms_;
};

/// Evaluates a fixed list of monomials (and optionally their gradients) at a
/// point using a shared power table.
class MonomialTable {
 public:
  MonomialTable() = default;
  explicit MonomialTable(std::vector<Exponent> exponents);

  int size() const { return static_cast<int>(exps_.size()); }
  int dim() const { return dim_; }
  const std::vector<Exponent>& exponents() const { return exps_; }

  void values(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out) const;
  /// out is size() x dim().
  void gradients(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::MatrixXd> out) const;

 private:
  std::vector<Exponent> exps_;
  int dim_ = 0;
  int max_exp_ = 0;
};

}  // namespace qcs
