#pragma once

#include "qcs/conformal.hpp"
#include "qcs/quadrature.hpp"
#include "qcs/sphere.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace qcs {

/// Exponents for the L^p Folland-Stein inequality on S^{4n+3}.
struct Parameters {
  int n = 1;
  double p = 2.0;

  /// Throws ValidationError unless n >= 0 and 1 < p < Q.
  Parameters(int n_, double p_ = 2.0);
  double Q() const { return 4.0 * n + 6.0; }
  double p_star() const { return Q() * p / (Q() - p); }
  double theta() const { return (Q() - p) / Q(); }
};

enum class AreaForm { factorial, gamma };

/// [2^{-2n} omega_{4n+3}]^{-1/Q} / (2 sqrt(n(n+1))).
double sharp_constant_qc(int n, AreaForm form = AreaForm::factorial);
/// Limit of the single-bubble quotient for the sphere normalization used
/// here: 1 / (4n(n+1) omega^{2/Q}) = sharp_constant_qc(n)^2 2^{-4n/Q}.
double sharp_constant_sphere(int n);
/// Best L^2 constant in the Heisenberg-type normalization.
double sharp_constant_htype(int n);
/// Same constant with Gamma(4n+3)/Gamma((4n+3)/2) rewritten by duplication.
double sharp_constant_htype_duplication(int n);

/// [(1 + |q|^2)^2 + |omega|^2]^{-(n+1)}.
double group_extremal(const GroupPoint& g);

/// u_lambda = |J_Phi|^{1/2*} omega^{-1/2*} with Phi = Gamma_{1/lambda, xi0}:
/// the conformal image of the normalized constant concentrating at xi0 as
/// lambda -> 0. |u_lambda|^{2*} is the pushforward density of the uniform law
/// under Gamma_{lambda, xi0}.
struct BubbleFamily {
  double lambda = 1.0;
  Eigen::VectorXd center;

  BubbleFamily(double lambda_, const SpherePoint& xi0);
  int n() const { return static_cast<int>(center.size() / 4) - 1; }
  SphereFunction profile() const;
  PushforwardMixture proposal() const;
};

struct QuotientEstimate {
  double value = 0.0;  ///< +inf when the gradient energy vanishes
  double std_error = 0.0;
  double lp_star = 0.0;  ///< int |u|^{p*}
  double lp_star_std_error = 0.0;
  double energy = 0.0;  ///< int |grad_qc u|^p
  double energy_std_error = 0.0;
  bool finite = true;
  std::string diagnostic;

  nlohmann::json to_json() const;
};

/// (int |u|^{p*})^{p/p*} / int |grad_qc u|^p from common samples (importance
/// sampled through `transform` when given), error by the delta method.
QuotientEstimate sobolev_quotient(const SphereFunction& u, const Parameters& par,
                                  const QuadratureSpec& spec,
                                  const SampleTransform& transform = {});

/// a^{1/2*} u_{lambda, xi1} + (1 - a)^{1/2*} u_{lambda, xi2} with xi2 = -xi1.
SphereFunction two_bubble_profile(double lambda, double a, const SpherePoint& xi1,
                                  const SpherePoint& xi2);

/// Quotient of two_bubble_profile at p = 2. Throws ValidationError unless
/// xi2 = -xi1 and a is in (0, 1].
QuotientEstimate two_bubble_quotient(double lambda, double a, const SpherePoint& xi1,
                                     const SpherePoint& xi2, const QuadratureSpec& spec);

/// a^{2/2*} + (1 - a)^{2/2*} - 1 for p = 2 and Q = 4n+6.
double concavity_gap(double a, int n);

struct Extrapolation {
  double value = 0.0;
  double std_error = 0.0;
  int degree = 0;
};

/// Weighted least-squares polynomial in lambda^2 evaluated at lambda = 0.
Extrapolation extrapolate_lambda2(const std::vector<double>& lambdas,
                                  const std::vector<double>& values,
                                  const std::vector<double>& std_errors, int degree = 2);

struct QuotientSeries {
  int n = 1;
  double mass = 1.0;  ///< 1 for the single bubble
  std::vector<double> lambdas;
  std::vector<QuotientEstimate> estimates;
  Extrapolation limit;

  nlohmann::json to_json() const;
};

/// Single-bubble (a = 1) or balanced/unbalanced antipodal two-bubble series
/// centered at N (and -N), extrapolated to lambda = 0.
QuotientSeries quotient_series(int n, const std::vector<double>& lambdas, double a,
                               const QuadratureSpec& spec);

struct Atom {
  Eigen::VectorXd point;
  double nu = 0.0;
  double nu_std_error = 0.0;
  double sigma = 0.0;
  double sigma_std_error = 0.0;
  double lhs = 0.0;  ///< nu^{2/2*}
  double bound = 0.0;  ///< S sigma (1 + tol)
  bool holds = false;
};

struct AtomReport {
  double radius = 0.0;
  double threshold = 0.05;
  double constant = 0.0;
  double tolerance = 0.05;
  double total_nu = 0.0;
  std::vector<Atom> atoms;
  std::string diagnostic;

  bool all_hold() const;
  nlohmann::json to_json() const;
};

struct AtomCheckOptions {
  double radius = 0.5;     ///< chordal cap radius
  double threshold = 0.05;  ///< minimum nu / int |u|^{2*} for an atom
  double constant = 0.0;    ///< 0: sharp_constant_qc(n)
  double tolerance = 0.05;
  int max_atoms = 8;
};

/// Greedy cap-mass atom detection for |u|^{2*} with gradient masses from
/// |grad_qc u|^2, then the atomic inequality nu^{2/2*} <= S sigma (1 + tol).
AtomReport cc_atom_check(const SphereFunction& u, int n, const QuadratureSpec& spec,
                         const AtomCheckOptions& opt = {},
                         const SampleTransform& transform = {});

/// Cap radius used for bubble families: min(0.5, 10 lambda).
double cap_radius(double lambda);

struct ResidualPoint {
  double value = 0.0;
  double std_error = 0.0;
};

/// r_m = | ||v_m||_s^s - ||u||_s^s - ||v_m - u||_s^s | per family member;
/// transforms[m] (may be empty) samples member m.
std::vector<ResidualPoint> brezis_lieb_check(const SphereFunction& u,
                                             const std::vector<SphereFunction>& family, int n,
                                             double s, const QuadratureSpec& spec,
                                             const std::vector<SampleTransform>& transforms = {});

/// int |grad v|^2 - int |grad u|^2 - int |grad (v - u)|^2 for v = u + w,
/// computed as 2 int <grad u, grad w>.
ResidualPoint energy_splitting(const SphereFunction& u, const SphereFunction& w, int n,
                               const QuadratureSpec& spec,
                               const SampleTransform& transform = {});

/// Uniform/bubble mixture proposal: mass `uniform_mass` on the uniform law
/// and the rest on the pushforward concentrating at xi0 with scale lambda.
PushforwardMixture bump_and_bubble_proposal(double lambda, const SpherePoint& xi0,
                                            double uniform_mass = 0.5);

}  // namespace qcs
