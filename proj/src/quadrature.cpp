#include "qcs/quadrature.hpp"

#include "qcs/quaternion.hpp"

#include <omp.h>

#include <cmath>
#include <numbers>
#include <optional>

namespace qcs {

Eigen::VectorXd MomentAccumulator::mean() const {
  Eigen::VectorXd m(k_);
  for (int a = 0; a < k_; ++a) m[a] = first_[a].value() / static_cast<double>(count_);
  return m;
}

Eigen::MatrixXd MomentAccumulator::mean_covariance() const {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k_, k_);
  if (count_ < 2) return cov;
  const double n = static_cast<double>(count_);
  const Eigen::VectorXd m = mean();
  for (int a = 0, idx = 0; a < k_; ++a) {
    for (int b = a; b < k_; ++b, ++idx) {
      const double c = (second_[idx].value() - n * m[a] * m[b]) / (n - 1.0) / n;
      cov(a, b) = c;
      cov(b, a) = c;
    }
  }
  for (int a = 0; a < k_; ++a) cov(a, a) = std::max(0.0, cov(a, a));
  return cov;
}

void set_thread_limit(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

double sphere_area_qc(int n) {
  double fact = 1.0;
  for (int m = 2; m <= 2 * n + 1; ++m) fact *= m;
  return 2.0 * std::pow(std::numbers::pi, 2 * n + 2) / fact;
}

double sphere_area(int ambient_dim) {
  const double half = 0.5 * ambient_dim;
  return 2.0 * std::exp(half * std::log(std::numbers::pi) - log_gamma(half));
}

double monomial_integral(std::span<const int> alpha) {
  // 2 prod Gamma((a_m+1)/2) / Gamma((|a|+D)/2), zero for any odd exponent.
  double log_num = 0.0;
  int total = 0;
  for (int a : alpha) {
    if (a % 2 != 0) return 0.0;
    log_num += log_gamma(0.5 * (a + 1));
    total += a;
  }
  const double dim = static_cast<double>(alpha.size());
  return 2.0 * std::exp(log_num - log_gamma(0.5 * (total + dim)));
}

std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                    0x51u};
  return std::mt19937_64(seq);
}

void draw_uniform_point(std::mt19937_64& rng, std::normal_distribution<double>& normal,
                        Eigen::Ref<Eigen::VectorXd> out) {
  double n2 = 0.0;
  do {
    for (Eigen::Index m = 0; m < out.size(); ++m) out[m] = normal(rng);
    n2 = out.squaredNorm();
  } while (n2 == 0.0);
  out /= std::sqrt(n2);
}

Eigen::MatrixXd sample_uniform(const QuadratureSpec& spec, int dim) {
  return draw_samples(spec, dim).points;
}

namespace {

struct ChunkResult {
  MomentAccumulator moments;
  std::optional<Eigen::VectorXd> bad_point;

  void merge(const ChunkResult& o) {
    moments.merge(o.moments);
    if (!bad_point && o.bad_point) bad_point = o.bad_point;
  }
};

McVectorEstimate integrate_impl(const VectorIntegrand& f, int k, const QuadratureSpec& spec,
                                int dim, const SampleTransform& transform, Execution exec) {
  if (spec.sample_count == 0 || spec.chunk_size == 0)
    throw std::invalid_argument("integrate_mc: sample_count and chunk_size must be positive");
  const double area = sphere_area(dim);
  const auto reduce = [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
    ChunkResult r{MomentAccumulator(k), std::nullopt};
    auto rng = chunk_rng(spec.seed, chunk);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    Eigen::VectorXd u(dim), x(dim), vals(k);
    for (std::uint64_t s = begin; s < end; ++s) {
      draw_uniform_point(rng, normal, u);
      const double aux = unif(rng);
      double w = area;
      const Eigen::VectorXd* point = &u;
      if (transform) {
        w = transform(u, aux, x);
        point = &x;
      }
      f(*point, vals);
      vals *= w;
      if (!vals.allFinite() || !std::isfinite(w)) {
        if (!r.bad_point) r.bad_point = *point;
        continue;
      }
      r.moments.add(vals);
    }
    return r;
  };
  ChunkResult total = chunked_reduce(spec.sample_count, spec.chunk_size,
                                     ChunkResult{MomentAccumulator(k), std::nullopt}, reduce, exec);
  if (total.bad_point)
    throw NonFiniteError("integrate_mc: non-finite integrand value", *total.bad_point);
  return {total.moments.mean(), total.moments.mean_covariance(), total.moments.count()};
}

}  // namespace

WeightedSamples draw_samples(const QuadratureSpec& spec, int dim, const SampleTransform& transform,
                             Execution exec) {
  if (spec.sample_count == 0 || spec.chunk_size == 0)
    throw std::invalid_argument("draw_samples: sample_count and chunk_size must be positive");
  WeightedSamples out{Eigen::MatrixXd(dim, static_cast<Eigen::Index>(spec.sample_count)),
                      Eigen::VectorXd(static_cast<Eigen::Index>(spec.sample_count))};
  const double area = sphere_area(dim);
  struct Nothing {
    void merge(const Nothing&) {}
  };
  chunked_reduce(
      spec.sample_count, spec.chunk_size, Nothing{},
      [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
        auto rng = chunk_rng(spec.seed, chunk);
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> unif;
        Eigen::VectorXd u(dim), x(dim);
        for (std::uint64_t s = begin; s < end; ++s) {
          draw_uniform_point(rng, normal, u);
          const double aux = unif(rng);
          const auto col = static_cast<Eigen::Index>(s);
          if (transform) {
            out.weights[col] = transform(u, aux, x);
            out.points.col(col) = x;
          } else {
            out.weights[col] = area;
            out.points.col(col) = u;
          }
        }
        return Nothing{};
      },
      exec);
  return out;
}

McVectorEstimate integrate_mc_vec(const VectorIntegrand& f, int k, const QuadratureSpec& spec,
                                  int dim, const SampleTransform& transform, Execution exec) {
  return integrate_impl(f, k, spec, dim, transform, exec);
}

McEstimate integrate_mc(const Integrand& f, const QuadratureSpec& spec, int dim,
                        const SampleTransform& transform, Execution exec) {
  const auto est = integrate_impl(
      [&f](const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> out) { out[0] = f(x); }, 1, spec,
      dim, transform, exec);
  return est.component(0);
}

namespace reference {
McVectorEstimate integrate_mc_vec_serial(const VectorIntegrand& f, int k,
                                         const QuadratureSpec& spec, int dim,
                                         const SampleTransform& transform) {
  return integrate_impl(f, k, spec, dim, transform, Execution::serial);
}
}  // namespace reference

}  // namespace qcs
