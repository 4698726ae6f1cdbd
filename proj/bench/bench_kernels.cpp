#include <benchmark/benchmark.h>

#include <random>

#include "cgame/kernels.hpp"

using namespace cgame;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, scale);
    Matrix m(rows, cols);
    for (auto& v : m.reshaped()) v = unit(rng);
    return m;
}

NetworkState digit_network(Eigen::Index n_out, Eigen::Index n_in) {
    NetworkState s(static_cast<std::size_t>(n_out), static_cast<std::size_t>(n_in));
    s.w = random_matrix(n_out, n_in, 1, 2.0 / static_cast<double>(n_in));
    const Matrix a = random_matrix(n_out, n_out, 2, 0.05);
    s.l = a + a.transpose();
    s.l.diagonal().setOnes();
    return s;
}

template <Exec E>
void BM_update_feedforward(benchmark::State& st) {
    const auto n_out = static_cast<Eigen::Index>(st.range(0));
    Matrix w = random_matrix(n_out, 784, 3, 0.002);
    const Vector x = random_matrix(n_out, 1, 4, 0.1).col(0);
    const Vector u = random_matrix(784, 1, 5).col(0);
    const kernels::FeedforwardRule rule{1e-3, 1.0, 1.0, 0.0, 0.1, true};
    for (auto _ : st) benchmark::DoNotOptimize(kernels::update_feedforward(E, w, x, u, rule));
    st.SetItemsProcessed(st.iterations() * n_out * 784);
}

template <Exec E>
void BM_solve_columns(benchmark::State& st) {
    const auto cols = static_cast<Eigen::Index>(st.range(0));
    const NetworkState s = digit_network(64, 784);
    const Matrix u = random_matrix(784, cols, 6);
    const DynamicsConfig cfg;
    for (auto _ : st) benchmark::DoNotOptimize(kernels::solve_columns(E, u, s, 1e-3, cfg));
    st.SetItemsProcessed(st.iterations() * cols);
}

template <Exec E>
void BM_second_moments(benchmark::State& st) {
    const auto t = static_cast<Eigen::Index>(st.range(0));
    const Matrix a = random_matrix(64, t, 7);
    const Matrix b = random_matrix(784, t, 8);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::second_moments(E, a, b));
    st.SetItemsProcessed(st.iterations() * t);
}

}  // namespace

BENCHMARK(BM_update_feedforward<Exec::Serial>)->Arg(64)->Arg(256);
BENCHMARK(BM_update_feedforward<Exec::Parallel>)->Arg(64)->Arg(256);
BENCHMARK(BM_solve_columns<Exec::Serial>)->Arg(100)->Arg(1000);
BENCHMARK(BM_solve_columns<Exec::Parallel>)->Arg(100)->Arg(1000);
BENCHMARK(BM_second_moments<Exec::Serial>)->Arg(1000)->Arg(10000);
BENCHMARK(BM_second_moments<Exec::Parallel>)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
