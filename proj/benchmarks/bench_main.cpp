#include <benchmark/benchmark.h>

#include "wgmig/acceptance.hpp"
#include "wgmig/medium.hpp"
#include "wgmig/propagator.hpp"

namespace {

using namespace wgmig;

Scenario sized_scenario(int n_modes) {
    Scenario sc = acceptance::transmission_scenario();
    sc.waveguide.omega0 = (n_modes + 0.5) * 3.14159265358979323846;
    const double lambda = sc.waveguide.wavelength();
    sc.medium.ell_z = lambda;
    sc.medium.ell_x = lambda;
    sc.array = ArrayGeometry::full(sc.waveguide, lambda / 8.0);
    return sc;
}

void BM_MediumSample(benchmark::State& state) {
    Scenario sc = sized_scenario(static_cast<int>(state.range(0)));
    const ModeBasis basis = sc.make_basis();
    const double extent = 200.0 * basis.wavelength();
    const MediumSampler sampler(sc.medium, basis, extent);
    std::uint64_t r = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(r++));
}
BENCHMARK(BM_MediumSample)->Arg(5)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Propagate(benchmark::State& state) {
    Scenario sc = sized_scenario(static_cast<int>(state.range(0)));
    const ModeBasis basis = sc.make_basis();
    const double extent = 200.0 * basis.wavelength();
    const double eps = sc.medium.epsilon;
    const MediumSampler sampler(sc.medium, basis, extent);
    const CouplingProcess coupling = sampler.sample(0);
    const double step = sc.step_limit(basis);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            propagate(basis.omega(), coupling, extent * eps * eps, eps, step));
}
BENCHMARK(BM_Propagate)->Arg(5)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_ExpmSkewHermitian(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(n, n);
    a = 0.05 * (a - a.adjoint()).eval();
    for (auto _ : state) benchmark::DoNotOptimize(detail::expm_skew_hermitian(a));
}
BENCHMARK(BM_ExpmSkewHermitian)->Arg(5)->Arg(10)->Arg(40)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
