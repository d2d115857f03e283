#include "qcs/centering.hpp"
#include "qcs/conformal.hpp"
#include "qcs/quadrature.hpp"

#include <benchmark/benchmark.h>

namespace {

const qcs::Integrand kMonomial = [](const Eigen::VectorXd& x) {
  return x[0] * x[0] * x[1] * x[1] + x[3] * x[3] * x[3] * x[3];
};

void integrate(benchmark::State& state, qcs::Execution exec) {
  const qcs::QuadratureSpec spec{static_cast<std::uint64_t>(state.range(0)), 1, 4096};
  for (auto _ : state) benchmark::DoNotOptimize(qcs::integrate_mc(kMonomial, spec, 8, {}, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_integrate_parallel(benchmark::State& s) { integrate(s, qcs::Execution::parallel); }
void BM_integrate_serial(benchmark::State& s) { integrate(s, qcs::Execution::serial); }

void integrate_jacobian(benchmark::State& state, qcs::Execution exec) {
  const qcs::QuadratureSpec spec{static_cast<std::uint64_t>(state.range(0)), 1, 4096};
  const auto g = qcs::Automorphism::dilation(0.5, qcs::SpherePoint::north(1));
  const qcs::Integrand f = [&g](const Eigen::VectorXd& z) { return qcs::jacobian(g, z); };
  for (auto _ : state) benchmark::DoNotOptimize(qcs::integrate_mc(f, spec, 8, {}, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_jacobian_parallel(benchmark::State& s) { integrate_jacobian(s, qcs::Execution::parallel); }
void BM_jacobian_serial(benchmark::State& s) { integrate_jacobian(s, qcs::Execution::serial); }

void balance(benchmark::State& state, qcs::Execution exec) {
  qcs::BalanceProblem prob;
  prob.density = qcs::Density::two_bubble(1, 0.3, 0.7);
  prob.quadrature = {static_cast<std::uint64_t>(state.range(0)), 1, 4096};
  const qcs::BalanceMap F(prob, exec);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(8);
  x[0] = 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(F(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_balance_parallel(benchmark::State& s) { balance(s, qcs::Execution::parallel); }
void BM_balance_serial(benchmark::State& s) { balance(s, qcs::Execution::serial); }

}  // namespace

BENCHMARK(BM_integrate_parallel)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_integrate_serial)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_jacobian_parallel)->Arg(1 << 15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_jacobian_serial)->Arg(1 << 15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_balance_parallel)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_balance_serial)->Arg(1 << 18)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
