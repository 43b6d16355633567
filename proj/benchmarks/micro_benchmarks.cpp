#include <benchmark/benchmark.h>

#include <random>

#include "dscem/lcd.hpp"
#include "dscem/mpc.hpp"
#include "dscem/proposal.hpp"

namespace {

void BM_CvmObjective(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int d = static_cast<int>(state.range(1));
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd pts(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) pts(i, j) = normal(rng);
    for (auto _ : state) benchmark::DoNotOptimize(dscem::cvm_distance(pts));
}
BENCHMARK(BM_CvmObjective)->Args({50, 30})->Args({100, 90});

void BM_ColoredCorrelation(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(dscem::colored_correlation({1.0, 30, 1}));
}
BENCHMARK(BM_ColoredCorrelation);

void BM_RolloutCartPole(benchmark::State& state) {
    const dscem::TaskSpec task = dscem::cart_pole_task();
    const Eigen::VectorXd x0 = (Eigen::VectorXd(4) << 0, 0, 3.0, 0).finished();
    const Eigen::VectorXd seq = Eigen::VectorXd::Constant(task.horizon, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(dscem::rollout_cost(x0, seq, task));
}
BENCHMARK(BM_RolloutCartPole);

void BM_MpcStepMountainCar(benchmark::State& state) {
    const dscem::TaskSpec task = dscem::mountain_car_task();
    dscem::CemConfig config;
    config.n_samples = 50;
    config.n_elite = 10;
    config.n_iter = 3;
    const dscem::MpcState mpc = dscem::make_initial_state(task, config);
    const Eigen::VectorXd x0 = (Eigen::VectorXd(2) << -0.5, 0).finished();
    std::mt19937_64 rng(11);
    for (auto _ : state)
        benchmark::DoNotOptimize(dscem::mpc_step(mpc, x0, task, config, rng));
}
BENCHMARK(BM_MpcStepMountainCar);

}  // namespace

BENCHMARK_MAIN();
