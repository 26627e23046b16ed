// SPDX-License-Identifier: MIT
#include <cmath>
#include <memory>

#include <benchmark/benchmark.h>

#include "bernstein/auxfun.hpp"
#include "bernstein/doubling.hpp"
#include "bernstein/equation.hpp"
#include "bernstein/pde.hpp"
#include "bernstein/structure.hpp"

using namespace bernstein;

namespace {

const LocalizationProfile& loc2d() {
    static const LocalizationProfile loc = [] {
        const ChiSpec chi{0.25, 1.0};
        auto psi = std::make_shared<const PsiProfile>(build_psi(chi, calibrate_k3(chi)));
        return build_localization(Vec::Zero(2), 1.0, psi);
    }();
    return loc;
}

void BM_MaximizePairs(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    GridField g = GridField::box(2, n, -1.0, 1.0);
    g.fill([](const Vec& x) { return std::sin(2 * x(0)) * std::cos(x(1)) + 0.5 * x(0) * x(1); });
    CouplingParams cp;
    cp.L = 1.0;
    cp.alpha_dbl = 1.0 / 64;
    cp.prune = state.range(1) != 0;
    std::size_t pairs = 0;
    for (auto _ : state) {
        const PairMaximum pm = maximize_pairs(g, loc2d(), cp);
        pairs = pm.pairs_evaluated;
        benchmark::DoNotOptimize(pm.value);
    }
    state.counters["pairs"] = static_cast<double>(pairs);
}
BENCHMARK(BM_MaximizePairs)->Args({33, 0})->Args({48, 0})->Args({48, 1})->Args({64, 0})->Unit(benchmark::kMillisecond);

void BM_ExtractLipschitz1d(benchmark::State& state) {
    const ChiSpec chi{0.25, 1.0};
    auto psi = std::make_shared<const PsiProfile>(build_psi(chi, calibrate_k3(chi)));
    const LocalizationProfile loc = build_localization(Vec::Zero(1), 0.5, psi);
    GridField g = GridField::box(1, static_cast<int>(state.range(0)), -1.0, 1.0);
    g.fill([](const Vec& x) { return -std::log(1.0 + 0.5 * x(0)); });
    for (auto _ : state) benchmark::DoNotOptimize(extract_lipschitz(g, loc, {}).l_star);
}
BENCHMARK(BM_ExtractLipschitz1d)->Arg(201)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_SolveElliptic(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    EllipticProblem p;
    p.domain = Domain{dim, -1.0, 1.0, static_cast<int>(state.range(1)), std::nullopt};
    p.m = dim == 1 ? 2.0 : 3.0;
    p.f = [](const Vec& x) { return 1.0 + x.squaredNorm(); };
    p.boundary = [](const Vec&) { return 0.0; };
    for (auto _ : state) benchmark::DoNotOptimize(solve_elliptic(p).report.residual_norm);
}
BENCHMARK(BM_SolveElliptic)->Args({1, 401})->Args({2, 33})->Args({2, 65})->Unit(benchmark::kMillisecond);

void BM_FindMinL(benchmark::State& state) {
    const EquationModel model = make_power_model(1, 2.0, ScalarField::constant(0.0, 1));
    FindLOptions fo;
    fo.sampler.center = Vec::Zero(1);
    fo.sampler.budget = static_cast<int>(state.range(0));
    fo.nu = 0.25 / 3.0;
    for (auto _ : state) benchmark::DoNotOptimize(find_min_L(model, Clause::i, {0.25, 1.0}, 0.25, 1.0, fo).L);
}
BENCHMARK(BM_FindMinL)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_CalibrateK3(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(calibrate_k3({0.25, 1.0}));
}
BENCHMARK(BM_CalibrateK3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
