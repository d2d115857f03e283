#include "doctest.h"
#include "oracles.hpp"

#include "qcs/errors.hpp"
#include "qcs/quadrature.hpp"

#include <numbers>

using namespace qcs;

TEST_SUITE("quadrature") {

TEST_CASE("sphere areas") {
  const double pi = std::numbers::pi;
  CHECK(sphere_area_qc(1) == doctest::Approx(pi * pi * pi * pi / 3.0).epsilon(1e-15));
  CHECK(sphere_area_qc(1) == doctest::Approx(32.4696970113341457).epsilon(1e-15));
  CHECK(sphere_area_qc(2) == doctest::Approx(16.0231532262550740).epsilon(1e-15));
  CHECK(sphere_area(3) == doctest::Approx(4 * pi));
  CHECK(sphere_area(8) == doctest::Approx(oracle::sphere_area(8)));
}

TEST_CASE("exact monomial integrals match the double-factorial oracle") {
  const std::vector<std::vector<int>> cases = {
      {2, 0, 0, 0, 0, 0, 0, 0}, {4, 0, 0, 0, 0, 0, 0, 0}, {4, 2, 0, 0, 0, 0, 0, 0},
      {2, 2, 2, 0, 0, 0, 0, 2}, {6, 0, 0, 0, 0, 0, 4, 0}, {2, 2, 0, 0, 0, 0}};
  for (const auto& a : cases)
    CHECK(monomial_integral(a) == doctest::Approx(oracle::even_monomial_integral(a)).epsilon(1e-13));
  CHECK(monomial_integral(std::vector<int>{1, 1, 0, 0, 0, 0, 0, 0}) == 0.0);
  CHECK(monomial_integral(std::vector<int>{3, 0, 0, 0, 0, 0, 0, 0}) == 0.0);
}

TEST_CASE("frozen S^7 moments") {
  CHECK(monomial_integral(std::vector<int>{2, 0, 0, 0, 0, 0, 0, 0}) ==
        doctest::Approx(4.05871212641676822).epsilon(1e-14));
  CHECK(monomial_integral(std::vector<int>{4, 0, 0, 0, 0, 0, 0, 0}) ==
        doctest::Approx(1.21761363792503047).epsilon(1e-14));
  CHECK(monomial_integral(std::vector<int>{4, 2, 0, 0, 0, 0, 0, 0}) ==
        doctest::Approx(0.101467803160419205).epsilon(1e-14));
}

TEST_CASE("Monte-Carlo estimate within 4 standard errors") {
  const QuadratureSpec spec{200'000, 7, 4096};
  const McEstimate e = integrate_mc([](const Eigen::VectorXd& x) { return x[0] * x[0] * x[1] * x[1]; },
                                    spec, 8);
  const double exact = oracle::even_monomial_integral({2, 2, 0, 0, 0, 0, 0, 0});
  CHECK(std::abs(e.value - exact) < 4 * e.std_error);
  CHECK(e.samples_used == spec.sample_count);
  CHECK(e.std_error < 0.02 * exact);
}

TEST_CASE("parallel and serial paths are bit-identical") {
  const QuadratureSpec spec{50'000, 3, 1000};
  const Integrand f = [](const Eigen::VectorXd& x) { return std::exp(x[0]) * x[3]; };
  const McEstimate a = integrate_mc(f, spec, 8, {}, Execution::parallel);
  const McEstimate b = integrate_mc(f, spec, 8, {}, Execution::serial);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  const VectorIntegrand g = [](const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> out) {
    out[0] = x[0];
    out[1] = x[1] * x[1];
  };
  const McVectorEstimate va = integrate_mc_vec(g, 2, spec, 8);
  const McVectorEstimate vb = reference::integrate_mc_vec_serial(g, 2, spec, 8);
  CHECK((va.value - vb.value).norm() == 0.0);
}

TEST_CASE("seeded reproducibility and sample layout") {
  const QuadratureSpec spec{1000, 42, 128};
  const Eigen::MatrixXd a = sample_uniform(spec, 8);
  const Eigen::MatrixXd b = sample_uniform(spec, 8);
  CHECK(a.cols() == 1000);
  CHECK((a - b).norm() == 0.0);
  CHECK((a.colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-14);
  const WeightedSamples w = draw_samples(spec, 8);
  CHECK((w.points - a).norm() == 0.0);
  CHECK(w.weights[0] == doctest::Approx(sphere_area(8)));
}

TEST_CASE("non-finite integrands raise with the offending point") {
  const QuadratureSpec spec{100, 1, 64};
  CHECK_THROWS_AS(integrate_mc([](const Eigen::VectorXd&) { return std::nan(""); }, spec, 8),
                  NonFiniteError);
}

}
