// Microbenchmarks for the hot paths: the flow right-hand side (dominates
// every sweep), one RK4 step, kernel Monte Carlo, and the Jacobi eigensolver.

#include <benchmark/benchmark.h>

#include "condlab/dataset.hpp"
#include "condlab/gram.hpp"
#include "condlab/integrate.hpp"
#include "condlab/linalg.hpp"
#include "condlab/network.hpp"
#include "condlab/rng.hpp"
#include "condlab/scaling.hpp"

namespace {

using namespace condlab;

struct Fixture {
  Dataset data;
  ScalingConfig scaling;
  Activation act;
  NormalizedParams params;

  explicit Fixture(std::size_t m)
      : data(synth_dataset(6, 4, 1)),
        scaling(from_exponents(m, 0.8, 0.8)),
        act(make_activation(ActivationKind::Tanh)),
        params(init_params(m, 4, 1)) {}
};

void BM_flow_rhs(benchmark::State& state) {
  Fixture fx(static_cast<std::size_t>(state.range(0)));
  FlowRhs rhs;
  for (auto _ : state) {
    flow_rhs(fx.params, fx.scaling, fx.act, fx.data, rhs);
    benchmark::DoNotOptimize(rhs.da.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(fx.params.m) *
                          static_cast<std::int64_t>(fx.data.n()));
}
BENCHMARK(BM_flow_rhs)->Arg(256)->Arg(1024)->Arg(4096);

void BM_rk4_step(benchmark::State& state) {
  Fixture fx(static_cast<std::size_t>(state.range(0)));
  Rk4Workspace<NormalizedParams, FlowRhs> ws;
  auto rhs = [&](const NormalizedParams& y, FlowRhs& out) {
    flow_rhs(y, fx.scaling, fx.act, fx.data, out);
  };
  NormalizedParams y = fx.params;
  for (auto _ : state) {
    step_rk4(y, 1e-3, rhs, ws);
    benchmark::DoNotOptimize(y.a.data());
  }
}
BENCHMARK(BM_rk4_step)->Arg(256)->Arg(1024)->Arg(4096);

void BM_kernel_mc(benchmark::State& state) {
  Fixture fx(64);
  const auto samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    SymmetricMatrix k =
        kernel_mc(fx.data, fx.scaling.eps, KernelKind::A, samples, 7, fx.act);
    benchmark::DoNotOptimize(k.data.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(samples));
}
BENCHMARK(BM_kernel_mc)->Arg(1000)->Arg(10000);

void BM_jacobi(benchmark::State& state) {
  const auto order = static_cast<std::size_t>(state.range(0));
  Pcg32 rng(derive_stream(11, fnv1a("bench"), order));
  SymmetricMatrix m(order);
  for (std::size_t i = 0; i < order; ++i) {
    for (std::size_t j = i; j < order; ++j) m(i, j) = rng.next_normal();
  }
  m.symmetrize();
  for (auto _ : state) {
    EigenDecomposition eig = jacobi_eigen(m);
    benchmark::DoNotOptimize(eig.values.data());
  }
}
BENCHMARK(BM_jacobi)->Arg(4)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
