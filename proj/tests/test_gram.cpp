#include <cmath>
#include <cstddef>
#include <vector>

#include <doctest.h>

#include "condlab/activation.hpp"
#include "condlab/dataset.hpp"
#include "condlab/errors.hpp"
#include "condlab/gram.hpp"
#include "condlab/harness.hpp"
#include "condlab/integrate.hpp"
#include "condlab/linalg.hpp"
#include "condlab/network.hpp"
#include "condlab/rng.hpp"
#include "condlab/scaling.hpp"

namespace {

// The kernels restated as plain loops over neurons, with no shared
// subexpressions, as an independent cross-check of the library's builders.
condlab::SymmetricMatrix gram_a_by_hand(const condlab::NormalizedParams& params,
                                        const condlab::ScalingConfig& scaling,
                                        const condlab::Activation& act,
                                        const condlab::Dataset& data) {
  const std::size_t n = data.n();
  condlab::SymmetricMatrix g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < params.m; ++k) {
        const double si = condlab::dot(params.W.row(k), data.input(i));
        const double sj = condlab::dot(params.W.row(k), data.input(j));
        sum += (act.eval(scaling.eps * si) / scaling.eps) *
               (act.eval(scaling.eps * sj) / scaling.eps);
      }
      g(i, j) = scaling.nu * std::pow(scaling.eps, 3) * sum /
                static_cast<double>(params.m);
    }
  g.symmetrize();
  return g;
}

condlab::SymmetricMatrix gram_w_by_hand(const condlab::NormalizedParams& params,
                                        const condlab::ScalingConfig& scaling,
                                        const condlab::Activation& act,
                                        const condlab::Dataset& data) {
  const std::size_t n = data.n();
  condlab::SymmetricMatrix g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < params.m; ++k) {
        const double si = condlab::dot(params.W.row(k), data.input(i));
        const double sj = condlab::dot(params.W.row(k), data.input(j));
        sum += params.a[k] * params.a[k] * act.eval_d1(scaling.eps * si) *
               act.eval_d1(scaling.eps * sj) *
               condlab::dot(data.input(i), data.input(j));
      }
      g(i, j) = std::pow(scaling.nu, 3) * scaling.eps * sum /
                static_cast<double>(params.m);
    }
  g.symmetrize();
  return g;
}

}  // namespace

TEST_SUITE("gram") {

TEST_CASE("zero weights silence the matching kernel") {
  const auto data = condlab::synth_dataset(3, 2, 5);
  const auto scaling = condlab::from_exponents(4, 0.5, 0.5);
  const auto act = condlab::make_activation(condlab::ActivationKind::Tanh);

  condlab::NormalizedParams params = condlab::init_params(4, 2, 6);
  params.W = condlab::Matrix(4, 2, 0.0);
  const auto ga = condlab::gram_a(params, scaling, act, data);
  for (double v : ga.data) CHECK(v == 0.0);

  condlab::NormalizedParams zero_a = condlab::init_params(4, 2, 6);
  zero_a.a.assign(4, 0.0);
  const auto gw = condlab::gram_w(zero_a, scaling, act, data);
  for (double v : gw.data) CHECK(v == 0.0);
}

TEST_CASE("a single neuron reduces to a rank-one formula") {
  condlab::NormalizedParams params;
  params.m = 1;
  params.d = 2;
  params.a = {0.9};
  params.W = condlab::Matrix(1, 2, 0.0);
  params.W(0, 0) = 0.4;
  params.W(0, 1) = -0.7;
  const auto scaling = condlab::from_scales(2, 0.3, 0.6);
  const auto act = condlab::make_activation(condlab::ActivationKind::Tanh);
  const condlab::Dataset data(2, 2, {1.0, 0.0, 0.0, 1.0}, {1.0, 1.0});

  const auto ga = condlab::gram_a(params, scaling, act, data);
  // With m = 1 each entry is just nu eps^3 ss_i ss_j for the one neuron.
  const double ss0 = condlab::scaled_sigma(act, 0.4, 0.6);
  const double ss1 = condlab::scaled_sigma(act, -0.7, 0.6);
  CHECK(ga(0, 0) ==
        doctest::Approx(0.3 * 0.216 * ss0 * ss0).epsilon(1e-15));
  CHECK(ga(0, 1) ==
        doctest::Approx(0.3 * 0.216 * ss0 * ss1).epsilon(1e-15));
  CHECK(ga(1, 1) ==
        doctest::Approx(0.3 * 0.216 * ss1 * ss1).epsilon(1e-15));
}

TEST_CASE("kernel builders match the plain-loop restatement") {
  const auto data = condlab::synth_dataset(5, 3, 71);
  const auto params = condlab::init_params(12, 3, 72);
  const auto scaling = condlab::from_exponents(12, 0.6, 0.3);
  for (auto kind : {condlab::ActivationKind::Tanh,
                    condlab::ActivationKind::ScaledSiLU,
                    condlab::ActivationKind::XTanh,
                    condlab::ActivationKind::ModifiedSoftplus}) {
    const auto act = condlab::make_activation(kind);
    const auto ga = condlab::gram_a(params, scaling, act, data);
    const auto ga_ref = gram_a_by_hand(params, scaling, act, data);
    const auto gw = condlab::gram_w(params, scaling, act, data);
    const auto gw_ref = gram_w_by_hand(params, scaling, act, data);
    for (std::size_t idx = 0; idx < ga.data.size(); ++idx) {
      CHECK(ga.data[idx] == doctest::Approx(ga_ref.data[idx]).epsilon(1e-13));
      CHECK(gw.data[idx] == doctest::Approx(gw_ref.data[idx]).epsilon(1e-13));
    }
    CHECK(ga.max_asymmetry() == 0.0);
    CHECK(gw.max_asymmetry() == 0.0);
  }
}

TEST_CASE("the linear activation makes the w-kernel a scaled data Gram") {
  const auto data = condlab::synth_dataset(4, 3, 81);
  const auto params = condlab::init_params(16, 3, 82);
  const auto scaling = condlab::from_exponents(16, 0.5, 0.25);
  const auto act = condlab::make_activation(condlab::ActivationKind::Linear);
  const auto gw = condlab::gram_w(params, scaling, act, data);
  const double a_sq = condlab::dot(params.a, params.a);
  const double factor =
      std::pow(scaling.nu, 3) * scaling.eps * a_sq / 16.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(gw(i, j) == doctest::Approx(factor *
                                        condlab::dot(data.input(i),
                                                     data.input(j)))
                            .epsilon(1e-14));
}

TEST_CASE("the combined kernel is positive semidefinite") {
  for (auto kind : {condlab::ActivationKind::Tanh,
                    condlab::ActivationKind::ScaledSiLU,
                    condlab::ActivationKind::XTanh,
                    condlab::ActivationKind::ModifiedSoftplus}) {
    const auto act = condlab::make_activation(kind);
    const auto data = condlab::synth_dataset(6, 3, 91);
    const auto params = condlab::init_params(24, 3, 92);
    const auto scaling = condlab::from_exponents(24, 0.7, 0.1);
    auto g = condlab::gram_a(params, scaling, act, data);
    const auto gw = condlab::gram_w(params, scaling, act, data);
    for (std::size_t idx = 0; idx < g.data.size(); ++idx)
      g.data[idx] += gw.data[idx];
    const auto summary = condlab::least_eigenvalue(g);
    CHECK(summary.lambda_min >= -1e-10 * std::max(summary.lambda_max, 1e-30));
  }
}

TEST_CASE("monte carlo limits recover closed forms") {
  const condlab::Dataset basis(2, 2, {1.0, 0.0, 0.0, 1.0}, {1.0, 1.0});
  const std::size_t samples = 20000;

  // Vanishing prefactor: sigma'(0) = 1, so the w-kernel is the data Gram.
  const auto tanh_act = condlab::make_activation(condlab::ActivationKind::Tanh);
  const auto kw = condlab::kernel_mc(basis, 1e-8, condlab::KernelKind::W,
                                     samples, 7, tanh_act);
  CHECK(kw(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(kw(1, 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::fabs(kw(0, 1)) < 1e-6);

  // Linear activation: the a-kernel is E[(w.x_i)(w.x_j)] = <x_i, x_j>.
  const auto linear = condlab::make_activation(condlab::ActivationKind::Linear);
  const auto ka = condlab::kernel_mc(basis, 1.0, condlab::KernelKind::A,
                                     samples, 8, linear);
  const double band = 5.0 / std::sqrt(static_cast<double>(samples));
  CHECK(std::fabs(ka(0, 0) - 1.0) < band);
  CHECK(std::fabs(ka(1, 1) - 1.0) < band);
  CHECK(std::fabs(ka(0, 1)) < band);
}

TEST_CASE("monte carlo sampling is deterministic in the seed") {
  const auto data = condlab::synth_dataset(3, 2, 14);
  const auto act = condlab::make_activation(condlab::ActivationKind::Tanh);
  const auto first =
      condlab::kernel_mc(data, 0.5, condlab::KernelKind::A, 5000, 3, act);
  const auto second =
      condlab::kernel_mc(data, 0.5, condlab::KernelKind::A, 5000, 3, act);
  CHECK(first.data == second.data);
  const auto shifted =
      condlab::kernel_mc(data, 0.5, condlab::KernelKind::A, 5000, 4, act);
  CHECK(first.data != shifted.data);
}

TEST_CASE("doubling the sample count shrinks the standard error") {
  const auto data = condlab::synth_dataset(4, 3, 15);
  const auto act = condlab::make_activation(condlab::ActivationKind::Tanh);
  double ratio_sum = 0.0;
  const int reps = 50;
  for (int rep = 0; rep < reps; ++rep) {
    const auto narrow = condlab::kernel_least_eigen_margin(
        data, 1.0, condlab::KernelKind::A, 4000, 100 + rep, act);
    const auto wide = condlab::kernel_least_eigen_margin(
        data, 1.0, condlab::KernelKind::A, 8000, 1000 + rep, act);
    ratio_sum += wide.standard_error / narrow.standard_error;
  }
  const double mean_ratio = ratio_sum / reps;
  const double expected = 1.0 / std::sqrt(2.0);
  CHECK(mean_ratio > expected * 0.8);
  CHECK(mean_ratio < expected * 1.2);
}

TEST_CASE("both limiting kernels are strictly positive at unit prefactor") {
  const auto data = condlab::synth_dataset(4, 3, 16);
  const auto act = condlab::make_activation(condlab::ActivationKind::Tanh);
  for (auto kind : {condlab::KernelKind::A, condlab::KernelKind::W}) {
    const auto margin =
        condlab::kernel_least_eigen_margin(data, 1.0, kind, 50000, 5, act);
    CHECK(margin.lambda_min > 0.0);
    CHECK(margin.margin > 3.0);
    CHECK(margin.standard_error > 0.0);
  }
}

TEST_CASE("the width average approaches the sampled limit") {
  // One draw of m i.i.d. weight rows against a fresh Monte Carlo stream:
  // the normalized a-kernel must sit within a few root-m widths of the limit.
  const auto data = condlab::synth_dataset(3, 2, 17);
  const auto act = condlab::make_activation(condlab::ActivationKind::Tanh);
  const std::size_t m = 16384;
  const auto params = condlab::init_params(m, 2, 18);
  const auto scaling = condlab::from_scales(m, 1.0, 1.0);
  const auto g = condlab::gram_a(params, scaling, act, data);
  const auto k =
      condlab::kernel_mc(data, 1.0, condlab::KernelKind::A, 200000, 19, act);
  const double tol = 5.0 / std::sqrt(static_cast<double>(m)) +
                     3.0 / std::sqrt(200000.0);
  for (std::size_t idx = 0; idx < g.data.size(); ++idx)
    CHECK(std::fabs(g.data[idx] - k.data[idx]) < tol);
}

TEST_CASE("the decay bound applies exactly when the regime is linear") {
  condlab::BaseConfig base;
  base.n = 4;
  base.d = 3;
  const auto lazy = condlab::run_single(0.5, 0.0, 1024, 3, base);
  const auto data = condlab::synth_dataset(4, 3, 3, base.label_scale);
  const auto act = condlab::make_activation(condlab::ActivationKind::Tanh);
  const auto scaling = lazy.trajectory.meta.scaling;
  const auto ka = condlab::kernel_least_eigen_margin(
      data, scaling.eps, condlab::KernelKind::A, 50000, 23, act);
  const auto kw = condlab::kernel_least_eigen_margin(
      data, scaling.eps, condlab::KernelKind::W, 50000, 24, act);
  const auto report = condlab::decay_bound_check(lazy.trajectory,
                                                 ka.lambda_min, kw.lambda_min,
                                                 scaling);
  REQUIRE(report.applicable);
  CHECK(report.passed);
  CHECK(report.rate > 0.0);
  REQUIRE(!report.bound_ratio.empty());
  CHECK(report.bound_ratio.front() == doctest::Approx(1.0).epsilon(1e-12));
  for (double r : report.bound_ratio) CHECK(r >= 1.0 - 1e-9);

  const auto condensed = condlab::run_single(1.6, 0.0, 64, 3, base);
  const auto skipped = condlab::decay_bound_check(
      condensed.trajectory, ka.lambda_min, kw.lambda_min,
      condensed.trajectory.meta.scaling);
  CHECK_FALSE(skipped.applicable);
  CHECK_FALSE(skipped.skip_reason.empty());
}

}  // TEST_SUITE("gram")
