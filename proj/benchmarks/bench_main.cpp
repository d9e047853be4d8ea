#include <cmath>

#include <benchmark/benchmark.h>

#include "bn6/branch.hpp"
#include "bn6/critical.hpp"
#include "bn6/expansion.hpp"
#include "bn6/radial_bvp.hpp"

namespace {

const bn6::CriticalData& unit_ball() {
    static const bn6::CriticalData cd = bn6::analyze_critical(bn6::DomainBall(1.0));
    return cd;
}

void BM_ShootingValue(benchmark::State& st) {
    const bn6::DomainBall unit(1.0);
    for (auto _ : st) benchmark::DoNotOptimize(bn6::positive_shooting_value(22.4691, unit, 1e-12));
}
BENCHMARK(BM_ShootingValue)->Unit(benchmark::kMillisecond);

void BM_GroundState(benchmark::State& st) {
    const bn6::DomainBall unit(1.0);
    for (auto _ : st) benchmark::DoNotOptimize(bn6::solve_positive(22.4691, unit, 1e-10));
}
BENCHMARK(BM_GroundState)->Unit(benchmark::kMillisecond);

void BM_SectorSpectrum(benchmark::State& st) {
    const auto& gs = unit_ball().ground_state;
    const int ell = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(bn6::sector_eigenvalues(gs, ell, 3));
}
BENCHMARK(BM_SectorSpectrum)->Arg(0)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_Collocation(benchmark::State& st) {
    const auto& gs = unit_ball().ground_state;
    const bn6::DomainBall unit(1.0);
    bn6::SolverSettings s;
    s.degree = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(bn6::solve_radial_collocation(gs.lambda, gs.profile, unit, 1e-11, s));
}
BENCHMARK(BM_Collocation)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_AnsatzEnergyShift(benchmark::State& st) {
    const auto& cd = unit_ball();
    const double eps = std::pow(10.0, -static_cast<double>(st.range(0)) / 2.0);
    const auto b = bn6::assemble_ansatz(cd.ground_state, cd.v0, eps, cd.constants.d0);
    for (auto _ : st) benchmark::DoNotOptimize(bn6::ansatz_energy_shift(b));
}
BENCHMARK(BM_AnsatzEnergyShift)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_ResidualL32(benchmark::State& st) {
    const auto& cd = unit_ball();
    const auto b = bn6::assemble_ansatz(cd.ground_state, cd.v0, 1e-3, cd.constants.d0);
    for (auto _ : st) benchmark::DoNotOptimize(bn6::residual_l32(b));
}
BENCHMARK(BM_ResidualL32)->Unit(benchmark::kMillisecond);

void BM_BranchPoint(benchmark::State& st) {
    const auto& cd = unit_ball();
    bn6::BranchOptions bo;
    bo.allow_any_sign = true;
    for (auto _ : st)
        benchmark::DoNotOptimize(bn6::solve_branch_point_at(cd.ground_state, cd.v0, -1e-2, cd.constants.d0_direct, bo));
}
BENCHMARK(BM_BranchPoint)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
