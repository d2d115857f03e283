#pragma once

#include "qcs/kernels.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace qcs {

/// Sample budget and seeding for Monte-Carlo integration. Identical specs give
/// bit-identical estimates regardless of thread count.
struct QuadratureSpec {
  std::uint64_t sample_count = 1'000'000;
  std::uint64_t seed = 1;
  std::uint64_t chunk_size = 4096;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples_used = 0;
};

/// Joint estimate of a vector of integrals from common samples.
struct McVectorEstimate {
  Eigen::VectorXd value;
  Eigen::MatrixXd covariance;  ///< covariance of the estimates themselves
  std::uint64_t samples_used = 0;

  McEstimate component(int i) const {
    return {value[i], std::sqrt(std::max(0.0, covariance(i, i))), samples_used};
  }
};

/// A non-finite integrand value; carries the offending point.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& what, Eigen::VectorXd point)
      : std::runtime_error(what), point_(std::move(point)) {}
  const Eigen::VectorXd& point() const { return point_; }

 private:
  Eigen::VectorXd point_;
};

/// Area of S^{4n+3}: 2 pi^{2n+2} / (2n+1)!.
double sphere_area_qc(int n);

/// Area of the unit sphere S^{D-1} in R^D: 2 pi^{D/2} / Gamma(D/2).
double sphere_area(int ambient_dim);

/// Exact integral of x^alpha over S^{D-1}, D = alpha.size().
double monomial_integral(std::span<const int> alpha);

/// Per-chunk generator; the stream depends only on (seed, chunk).
std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t chunk);

/// Draws one uniform point on S^{D-1} (normalized Gaussian).
void draw_uniform_point(std::mt19937_64& rng, std::normal_distribution<double>& normal,
                        Eigen::Ref<Eigen::VectorXd> out);

/// All points used by integrate_mc for this spec, one per column.
Eigen::MatrixXd sample_uniform(const QuadratureSpec& spec, int dim);

/// Maps a uniform point (plus an auxiliary uniform variate in [0,1)) to an
/// importance-sampled point; returns the estimator weight 1/p(point) where p
/// is the proposal density w.r.t. surface measure.
using SampleTransform =
    std::function<double(const Eigen::VectorXd& uniform_point, double u01, Eigen::VectorXd& out)>;

/// Writes K integrand values at a sphere point.
using VectorIntegrand =
    std::function<void(const Eigen::VectorXd& point, Eigen::Ref<Eigen::VectorXd> out)>;
using Integrand = std::function<double(const Eigen::VectorXd& point)>;

/// Estimates the K integrals of `f` over S^{dim-1}. Without a transform the
/// samples are uniform with weight area(S^{dim-1}). Throws NonFiniteError
/// naming the first offending point in sample order.
McVectorEstimate integrate_mc_vec(const VectorIntegrand& f, int k, const QuadratureSpec& spec,
                                  int dim, const SampleTransform& transform = {},
                                  Execution exec = Execution::parallel);

McEstimate integrate_mc(const Integrand& f, const QuadratureSpec& spec, int dim,
                        const SampleTransform& transform = {},
                        Execution exec = Execution::parallel);

/// Points and estimator weights exactly as integrate_mc_vec would see them.
struct WeightedSamples {
  Eigen::MatrixXd points;   ///< dim x count
  Eigen::VectorXd weights;  ///< 1/p(point), or the sphere area when uniform
};

WeightedSamples draw_samples(const QuadratureSpec& spec, int dim,
                             const SampleTransform& transform = {},
                             Execution exec = Execution::parallel);

namespace reference {
/// Serial reference used to pin the parallel kernel.
McVectorEstimate integrate_mc_vec_serial(const VectorIntegrand& f, int k,
                                         const QuadratureSpec& spec, int dim,
                                         const SampleTransform& transform = {});
}  // namespace reference

}  // namespace qcs
