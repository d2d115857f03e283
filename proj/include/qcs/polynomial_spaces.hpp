#pragma once

#include "qcs/measure.hpp"
#include "qcs/polynomial.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace qcs {

/// Homogeneous polynomials of bidegree (j, k) on C^{2n+2}: monomials
/// z^alpha conj(z)^beta with |alpha| = j, |beta| = k. Complex coordinates are
/// ordered (z_1..z_{n+1}, w_1..w_{n+1}) where zeta_l = z_l + w_l j.
struct BidegreeBasis {
  int j = 0;
  int k = 0;
  int n = 0;
  std::vector<std::pair<Exponent, Exponent>> monomials;

  std::size_t count() const { return monomials.size(); }
  /// Monomial m as a polynomial in the 4n+4 real coordinates.
  ComplexPolynomial polynomial(std::size_t m) const;
};

BidegreeBasis enumerate_bidegree(int j, int k, int n);

/// Real monomials of total degree <= ell in `dim` variables.
struct RealPolyBasis {
  int ell = 0;
  int dim = 0;
  std::vector<Exponent> monomials;
  std::size_t count() const { return monomials.size(); }
};

RealPolyBasis enumerate_real(int ell, int dim);

/// Complex coordinate index c (0..2n+1) as a polynomial in real coordinates.
ComplexPolynomial complex_coordinate(int n, int c);

/// Relative eigenvalue cutoff for Gram ranks.
inline constexpr double kRankTolerance = 1e-9;

/// Dimension of the span of the given polynomials restricted to S^{D-1}:
/// the rank of their exact L^2(S^{D-1}) Gram matrix.
int restricted_span_dimension(const std::vector<RealPolynomial>& functions,
                              double rank_tol = kRankTolerance);

/// Real functions spanning the cumulative space sum_{j'<=j,k'<=k} P_{j',k'}
/// (real and imaginary parts of every monomial).
std::vector<RealPolynomial> cumulative_bidegree_functions(int j, int k, int n);

/// Which moment constraints: all real polynomials of degree <= ell on
/// R^dim, or the cumulative bidegree space (j, k) on C^{2n+2}.
struct ConstraintSpec {
  enum class Kind { degree, bidegree };
  Kind kind = Kind::degree;
  int ell = 1;
  int j = 0;
  int k = 0;
  int dim = 8;  ///< ambient dimension; 4n+4 for bidegree specs

  static ConstraintSpec degree(int ell, int dim) { return {Kind::degree, ell, 0, 0, dim}; }
  static ConstraintSpec bidegree(int j, int k, int n) {
    return {Kind::bidegree, j + k, j, k, 4 * n + 4};
  }
  int n() const { return dim / 4 - 1; }
  std::string label() const;
};

/// Orthonormal (in L^2(S^{D-1})) basis of the mean-zero subspace of a
/// restricted polynomial space, stored as coefficients over a monomial table.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  ConstraintSet(ConstraintSpec spec, std::vector<Exponent> monomials, Eigen::MatrixXd coeffs);

  const ConstraintSpec& spec() const { return spec_; }
  int size() const { return static_cast<int>(coeffs_.rows()); }
  int dim() const { return spec_.dim; }
  const MonomialTable& table() const { return table_; }
  const Eigen::MatrixXd& coefficients() const { return coeffs_; }  ///< size() x monomials
  /// Exact Gram matrix of the members (identity up to rounding).
  const Eigen::MatrixXd& gram() const { return gram_; }

  /// Member values at a point.
  Eigen::VectorXd evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// size() x dim() Jacobian of the members at a point.
  Eigen::MatrixXd jacobian(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Member m as a polynomial.
  RealPolynomial member(int m) const;

  nlohmann::json to_json() const;

 private:
  ConstraintSpec spec_;
  MonomialTable table_;
  Eigen::MatrixXd coeffs_;
  Eigen::MatrixXd gram_;
};

ConstraintSet mean_zero_constraints(const ConstraintSpec& spec, double rank_tol = kRankTolerance);

/// Exact L^2(S^{D-1}) inner products <a_i, b_j> between two constraint sets.
Eigen::MatrixXd cross_gram(const ConstraintSet& a, const ConstraintSet& b);

/// Component m = sum_i nu_i g_m(x_i).
Eigen::VectorXd moment_vector(const AtomicMeasure& nu, const ConstraintSet& c);

/// Same for a weighted point cloud (columns of points).
Eigen::VectorXd moment_vector(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights,
                              const ConstraintSet& c);

}  // namespace qcs
