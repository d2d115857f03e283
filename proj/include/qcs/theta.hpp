#pragma once

#include "qcs/measure.hpp"
#include "qcs/polynomial_spaces.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qcs {

/// sum_i nu_i^theta over atoms with positive weight. Throws ValidationError
/// unless theta is in (0, 1].
double theta_objective(const AtomicMeasure& nu, double theta);

/// Max |component| of the constraint moment vector.
double feasibility(const AtomicMeasure& nu, const ConstraintSet& c);

enum class Candidate { antipodal, simplex, cross_polytope, real_simplex };

std::string to_string(Candidate c);
Candidate candidate_from_string(const std::string& s);

/// Equal-weight symmetric configuration on S^{dim-1}:
///   antipodal: {+e_1, -e_1}; simplex: dim+1 regular simplex vertices;
///   cross_polytope: {+-e_i}; real_simplex: regular simplex in the totally
///   real subspace spanned by the real parts of the complex coordinates
///   (dim must be a multiple of 4).
AtomicMeasure candidate_measure(Candidate c, int dim);

/// Dimension-forced lower bound on the support of a feasible measure:
/// the Delsarte bound for degree specs, 2 for bidegree specs.
int minimum_support(const ConstraintSpec& spec);

struct ThetaTraceEntry {
  std::string start;  ///< "candidate:<name>" or "random:m=<m>,seed=<s>"
  int support_size = 0;  ///< final support
  double value = 0.0;
  double residual = 0.0;
  bool feasible = false;
  bool vertex = false;  ///< weight polish ended at a vertex
  int iterations = 0;
};

struct ThetaResult {
  std::string label;
  double theta = 0.0;
  double value = 0.0;
  AtomicMeasure measure;
  double constraint_residual = 0.0;
  int support_size = 0;
  bool feasible = false;
  bool exploratory = false;  ///< bidegree specs have no known closed form
  std::string warm_start;  ///< best symmetric candidate ("" if none feasible)
  double warm_start_value = 0.0;
  bool warm_start_beaten = false;
  std::vector<ThetaTraceEntry> trace;
  std::string report;  ///< infeasibility diagnostics

  nlohmann::json to_json(bool include_trace = true) const;
};

/// Exact objective and feasibility of a configuration against `c`;
/// feasible means residual <= tol.
ThetaResult certify_candidate(const AtomicMeasure& nu, const ConstraintSet& c, double theta,
                              double tol = 1e-12, const std::string& label = "explicit");
ThetaResult certify_candidate(Candidate cand, const ConstraintSet& c, double theta,
                              double tol = 1e-12);

struct ThetaOptions {
  int support_min = 0;  ///< 0: minimum_support(spec)
  int support_max = 0;  ///< 0: 3 * dim
  int seeds = 3;        ///< random starts per support size
  std::uint64_t base_seed = 1;
  double feasibility_tol = 1e-8;
  double epsilon = 1e-12;  ///< smoothing in (nu + eps)^theta - eps^theta
  int stage_iterations = 250;
  int restore_iterations = 60;
};

/// Minimizes sum nu_i^theta over atomic probability measures with vanishing
/// constraint moments. Never returns more than the best feasible symmetric
/// candidate. When nothing feasible is found the result has feasible = false
/// and a report naming the spec and support sizes tried.
ThetaResult solve_theta(const ConstraintSet& c, double theta, const ThetaOptions& opt = {});

/// Locally optimizes a starting configuration (penalty continuation,
/// feasibility restoration, vertex polish).
ThetaTraceEntry refine_measure(const ConstraintSet& c, double theta, AtomicMeasure& nu,
                               const ThetaOptions& opt);

/// Concave weight polish for fixed atoms: walks the feasible weight polytope
/// to a vertex without increasing the objective. Returns true at a vertex.
bool polish_weights(const ConstraintSet& c, double theta, AtomicMeasure& nu);

}  // namespace qcs
