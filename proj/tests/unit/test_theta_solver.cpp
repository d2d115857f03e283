#include "doctest.h"

#include "qcs/errors.hpp"
#include "qcs/theta.hpp"

#include <cmath>

using namespace qcs;

TEST_SUITE("theta_solver") {

TEST_CASE("objective and validation") {
  const AtomicMeasure nu = candidate_measure(Candidate::antipodal, 8);
  CHECK(theta_objective(nu, 0.8) == doctest::Approx(std::pow(2.0, 0.2)));
  CHECK(theta_objective(nu, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(theta_objective(nu, 0.0), ValidationError);
  CHECK_THROWS_AS(theta_objective(nu, 1.5), ValidationError);
}

TEST_CASE("candidate shapes") {
  const AtomicMeasure s = candidate_measure(Candidate::simplex, 8);
  CHECK(s.size() == 9);
  CHECK((s.points.colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-14);
  // Regular simplex: pairwise inner products -1/N.
  CHECK(s.points.col(0).dot(s.points.col(1)) == doctest::Approx(-1.0 / 8));
  CHECK(candidate_measure(Candidate::cross_polytope, 8).size() == 16);
  CHECK(candidate_from_string("cross-polytope") == Candidate::cross_polytope);
  CHECK(to_string(Candidate::real_simplex) == "real-simplex");
  CHECK_THROWS(candidate_from_string("cube"));
}

TEST_CASE("minimum supports") {
  CHECK(minimum_support(ConstraintSpec::degree(1, 8)) == 2);
  CHECK(minimum_support(ConstraintSpec::degree(2, 8)) == 9);
  CHECK(minimum_support(ConstraintSpec::degree(3, 8)) == 16);
  CHECK(minimum_support(ConstraintSpec::bidegree(1, 1, 1)) == 2);
}

TEST_CASE("certificates verify exactly") {
  const double th = 0.8;
  const ConstraintSet c1 = mean_zero_constraints(ConstraintSpec::degree(1, 8));
  const ConstraintSet c2 = mean_zero_constraints(ConstraintSpec::degree(2, 8));
  const ConstraintSet c3 = mean_zero_constraints(ConstraintSpec::degree(3, 8));
  CHECK(certify_candidate(Candidate::antipodal, c1, th).feasible);
  CHECK(certify_candidate(Candidate::simplex, c2, th).feasible);
  CHECK(certify_candidate(Candidate::cross_polytope, c3, th).feasible);
  CHECK_FALSE(certify_candidate(Candidate::antipodal, c2, th).feasible);
  CHECK_FALSE(certify_candidate(Candidate::simplex, c3, th).feasible);
  CHECK(certify_candidate(Candidate::simplex, c2, th).value == doctest::Approx(std::pow(9.0, 0.2)));
}

TEST_CASE("solver reproduces the degree-one value") {
  const ConstraintSet c = mean_zero_constraints(ConstraintSpec::degree(1, 8));
  ThetaOptions opt;
  opt.support_max = 6;
  opt.seeds = 1;
  const ThetaResult r = solve_theta(c, 0.8, opt);
  CHECK(r.feasible);
  CHECK(r.value == doctest::Approx(std::pow(2.0, 0.2)).epsilon(1e-3));
  CHECK(r.constraint_residual < 1e-8);
  CHECK(r.measure.is_probability(1e-9));
}

TEST_CASE("theta = 1 is trivially 1") {
  const ConstraintSet c = mean_zero_constraints(ConstraintSpec::degree(2, 8));
  CHECK(solve_theta(c, 1.0).value == 1.0);
}

TEST_CASE("solver is deterministic in the seed") {
  const ConstraintSet c = mean_zero_constraints(ConstraintSpec::degree(1, 4));
  ThetaOptions opt;
  opt.support_max = 4;
  opt.seeds = 2;
  const ThetaResult a = solve_theta(c, 0.7, opt), b = solve_theta(c, 0.7, opt);
  CHECK(a.to_json().dump() == b.to_json().dump());
}

}
