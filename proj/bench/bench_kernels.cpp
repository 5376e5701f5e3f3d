// Serial reference kernels against their OpenMP versions on Garnet instances.

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "boundlab/garnet.hpp"
#include "boundlab/kernels.hpp"

namespace {

using namespace boundlab;

Mdp instance(int states, int actions) {
    GarnetSpec spec;
    spec.n_states = states;
    spec.n_actions = actions;
    spec.branching = std::max(1, states / 4);
    spec.seed = 7;
    return generate_garnet(spec);
}

std::vector<Actions> random_policies(int count, int states, int actions) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> pick(0, actions - 1);
    std::vector<Actions> out(count, Actions(states));
    for (Actions& a : out)
        for (int& x : a) x = pick(rng);
    return out;
}

RowVector uniform_row(int n) { return RowVector::Constant(n, 1.0 / n); }

template <kernels::Backend B>
void vertex_gaps(benchmark::State& state) {
    const int S = static_cast<int>(state.range(0));
    const Mdp mdp = instance(S, 4);
    const auto vertices = random_policies(64, S, 4);
    std::vector<std::size_t> rows(vertices.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const RowVector nu = uniform_row(S);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::vertex_gaps(mdp, nu, vertices, rows, B));
}

template <kernels::Backend B>
void stationary_terms(benchmark::State& state) {
    const int S = static_cast<int>(state.range(0));
    const Mdp mdp = instance(S, 3);
    const auto policies = random_policies(64, S, 3);
    const Matrix start = Matrix::Constant(8, S, 1.0 / S);
    const RowVector nu = uniform_row(S);
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::stationary_terms(mdp, start, nu, policies, 20, B));
}

template <kernels::Backend B>
void nonstationary_terms(benchmark::State& state) {
    const int S = static_cast<int>(state.range(0));
    const Mdp mdp = instance(S, 3);
    const Matrix start = Matrix::Constant(8, S, 1.0 / S);
    const RowVector nu = uniform_row(S);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::nonstationary_terms(mdp, start, nu, 20, B));
}

constexpr auto serial = kernels::Backend::serial;
constexpr auto openmp = kernels::Backend::openmp;

}  // namespace

BENCHMARK(vertex_gaps<serial>)->Arg(16)->Arg(64);
BENCHMARK(vertex_gaps<openmp>)->Arg(16)->Arg(64);
BENCHMARK(stationary_terms<serial>)->Arg(16)->Arg(64);
BENCHMARK(stationary_terms<openmp>)->Arg(16)->Arg(64);
BENCHMARK(nonstationary_terms<serial>)->Arg(16)->Arg(64);
BENCHMARK(nonstationary_terms<openmp>)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
