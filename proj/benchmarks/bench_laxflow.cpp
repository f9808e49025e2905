#include "laxflow/hamiltonian.hpp"
#include "laxflow/jacobian.hpp"
#include "laxflow/residue.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace laxflow;

namespace {

AnsatzSpec at_infinity(int n, int m) { return {{{Place::infinity(), n, m}}, std::nullopt}; }

KricheverLax mumford_g2() { return mumford_lax(Poly{0.3, -1.1, 0.2, 1.0}, Poly{0.4, 0.7}, Poly{1.2, -0.5, 0.8}); }

CurvePtr genus2() { return BaseCurve::hyperelliptic(Poly{1.0, 1.0, 0.0, 0.0, 0.0, 1.0}); }

KricheverLax krichever(std::uint64_t seed) {
    auto c = genus2();
    Divisor K = canonical_divisor(*c);
    std::mt19937_64 rng(seed);
    return construct_lax(c, K, sample_params(c, K, 2, rng));
}

void BM_RiemannRochBasis(benchmark::State& st) {
    auto c = genus2();
    Divisor D = canonical_divisor(*c);
    D.add(c->places_over(0.3)[0], static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(rr_basis(c, D));
}
BENCHMARK(BM_RiemannRochBasis)->Arg(1)->Arg(3)->Arg(6);

void BM_ConstructLax(benchmark::State& st) {
    auto c = genus2();
    Divisor K = canonical_divisor(*c);
    std::mt19937_64 rng(1);
    auto p = sample_params(c, K, 2, rng);
    for (auto _ : st) benchmark::DoNotOptimize(construct_lax(c, K, p));
}
BENCHMARK(BM_ConstructLax);

void BM_SpectralCurve(benchmark::State& st) {
    auto L = krichever(2);
    for (auto _ : st) benchmark::DoNotOptimize(spectral_curve(L));
}
BENCHMARK(BM_SpectralCurve);

void BM_BuildM(benchmark::State& st) {
    auto L = krichever(3);
    auto a = at_infinity(1, static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(build_m(L, a));
}
BENCHMARK(BM_BuildM)->Arg(0)->Arg(1)->Arg(2);

void BM_FixedPoleRK4(benchmark::State& st) {
    auto L = mumford_g2();
    for (auto _ : st) benchmark::DoNotOptimize(integrate_flow(L, at_infinity(1, -1), 1.0, 1e-3, Scheme::RK4, 1000));
}
BENCHMARK(BM_FixedPoleRK4)->Unit(benchmark::kMillisecond);

void BM_MovingPoleRK2(benchmark::State& st) {
    auto L = krichever(11);
    for (auto _ : st) benchmark::DoNotOptimize(integrate_flow(L, at_infinity(1, 1), 0.01, 2.5e-3, Scheme::MovingPoleRK2, 4));
}
BENCHMARK(BM_MovingPoleRK2)->Unit(benchmark::kMillisecond);

void BM_Periods(benchmark::State& st) {
    auto m = hyperelliptic_model(spectral_curve(mumford_g2()));
    for (auto _ : st) benchmark::DoNotOptimize(periods(m));
}
BENCHMARK(BM_Periods)->Unit(benchmark::kMillisecond);

void BM_LambdaTails(benchmark::State& st) {
    auto L = mumford_g2();
    auto m = hyperelliptic_model(spectral_curve(L));
    auto M = build_m(L, at_infinity(1, -1));
    for (auto _ : st) benchmark::DoNotOptimize(lambda_tails(L, M, m, 1));
}
BENCHMARK(BM_LambdaTails);

void BM_HamiltonianValue(benchmark::State& st) {
    auto L = mumford_g2();
    HamiltonianSpec h{Place::infinity(), static_cast<int>(st.range(0)), -6};
    for (auto _ : st) benchmark::DoNotOptimize(hamiltonian_value(L, h));
}
BENCHMARK(BM_HamiltonianValue)->Arg(2)->Arg(4);

}  // namespace
BENCHMARK_MAIN();
