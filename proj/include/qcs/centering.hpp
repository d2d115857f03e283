#pragma once

#include "qcs/conformal.hpp"
#include "qcs/quadrature.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace qcs {

/// Probability density on S^{4n+3} (integral 1 w.r.t. surface measure),
/// optionally paired with an importance-sampling proposal.
struct Density {
  std::string name;
  nlohmann::json params;
  int n = 1;
  SphereFunction f;
  /// When set, samples come from this proposal instead of the uniform law.
  std::optional<PushforwardMixture> proposal;

  int dim() const { return 4 * n + 4; }

  static Density uniform(int n);
  /// |u_lambda|^{2*} / int |u_lambda|^{2*} for the bubble concentrated at xi0;
  /// this is the pushforward of the uniform law under Gamma_{lambda, xi0}.
  static Density bubble(double lambda, const SpherePoint& xi0);
  /// mass * bubble(lambda, N) + (1 - mass) * bubble(lambda, -N).
  static Density two_bubble(int n, double lambda, double mass);
  /// Normalizes a nonnegative function by Monte-Carlo on uniform samples.
  static Density custom(int n, SphereFunction g, const QuadratureSpec& spec,
                        std::string name = "custom");
};

struct BalanceProblem {
  Density density;
  double r = 2.0;  ///< exponent in f = |u|^r / int |u|^r
  QuadratureSpec quadrature{200'000, 1, 4096};
  double tol = 1e-6;
};

/// F(x) = int Gamma_{1-|x|, x/|x|}(zeta) f(zeta) d zeta on a fixed sample set
/// (common random numbers), so F is a deterministic smooth function of x.
class BalanceMap {
 public:
  explicit BalanceMap(const BalanceProblem& prob, Execution exec = Execution::parallel);

  /// Requires |x| < 1; throws ValidationError otherwise.
  Eigen::VectorXd operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Central-difference Jacobian.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, double h = 1e-6) const;

  int dim() const { return static_cast<int>(points_.rows()); }
  /// Kish effective sample size of the self-normalized weights.
  double effective_samples() const { return ess_; }
  /// Standard error of F(0) (per component, max).
  double center_stderr() const { return center_stderr_; }
  /// Raw estimate of int f (should be 1).
  double mass_estimate() const { return mass_; }
  std::uint64_t evaluations() const { return evals_; }

 private:
  Eigen::MatrixXd points_;
  Eigen::VectorXd coeffs_;  ///< self-normalized weights, sum 1
  std::uint64_t chunk_size_;
  Execution exec_;
  double ess_ = 0.0;
  double center_stderr_ = 0.0;
  double mass_ = 0.0;
  mutable std::uint64_t evals_ = 0;
};

/// One evaluation of F, without caching samples.
Eigen::VectorXd balance_map(const BalanceProblem& prob, const Eigen::VectorXd& x);

/// Gamma = Gamma_{1-r0, xi0} for the root x = r0 xi0 (identity at x = 0).
Automorphism balance_automorphism(const Eigen::VectorXd& x);

struct CenteringVerification {
  Eigen::VectorXd moment;  ///< int zeta |u^Phi|^r, literal pullback, independent seed
  double norm = 0.0;
  double std_error = 0.0;  ///< max componentwise
  double lr_before = 0.0;  ///< int |u|^r
  double lr_after = 0.0;   ///< int |u^Phi|^r
  double lr_std_error = 0.0;
  bool passed = false;
};

struct CenteringResult {
  Automorphism phi = Automorphism::identity(1);
  Eigen::VectorXd root;  ///< x = r0 xi0
  double residual = 0.0;  ///< |F(root)|
  int iterations = 0;
  int start_index = -1;  ///< which multistart succeeded; -1 for the homotopy
  bool identity = false;
  bool used_homotopy = false;
  double effective_samples = 0.0;
  CenteringVerification verification;

  nlohmann::json to_json() const;
};

struct CenteringOptions {
  int max_iterations = 60;
  bool verify = true;
  std::uint64_t verify_seed_offset = 1'000'003;
  /// Minimum effective sample size before the density counts as resolved.
  double min_effective_samples = 200.0;
};

/// Finds Phi with int zeta |u^Phi|^r = 0. Throws ValidationError for an
/// under-resolved density and ConvergenceError when every start and the
/// homotopy fail.
CenteringResult find_centering(const BalanceProblem& prob, const CenteringOptions& opt = {});

/// int zeta |u^Phi|^r d zeta evaluated through pullback() with u = f^{1/r}.
CenteringVerification verify_centering(const BalanceProblem& prob, const Automorphism& phi,
                                       const QuadratureSpec& spec);

}  // namespace qcs
