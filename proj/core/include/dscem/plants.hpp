#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace dscem {

enum class PlantId { MountainCar, CartPole, Integrator };

// Everything a benchmark run needs: dynamics id, discretization, horizon,
// weights, limits, process noise, and the initial-state distribution.
struct TaskSpec {
    PlantId dynamics = PlantId::MountainCar;
    double dt = 1.0;
    int horizon = 30;
    int total_steps = 100;
    int control_dim = 1;
    Eigen::VectorXd u_min, u_max;
    Eigen::VectorXd q_weights;      // diagonal, in cost space (augmented for cart-pole)
    double r_weight = 0.0;
    Eigen::VectorXd q_terminal;     // diagonal, cost space
    Eigen::VectorXd goal;           // cost space
    Eigen::VectorXd process_noise;  // diagonal of C_w, state space
    double noise_beta = 0.0;        // proposal noise color
    double sigma0 = 1.0;            // initial proposal std dev
    Eigen::VectorXd init_state_lo, init_state_hi;  // uniform box for x_0

    int state_dim() const {
        if (dynamics == PlantId::CartPole) return 4;
        return dynamics == PlantId::Integrator ? 1 : 2;
    }
    int cost_dim() const {
        if (dynamics == PlantId::CartPole) return 5;
        return dynamics == PlantId::Integrator ? 1 : 2;
    }
};

// Benchmark defaults for the two evaluation tasks.
TaskSpec mountain_car_task();
TaskSpec cart_pole_task();

// 1-D single integrator (x' = u); with dt = 1 and zero-order hold, RK4 is
// exact and gives x_{k+1} = x_k + u_k. Used as an analytically tractable
// reference plant.
TaskSpec integrator_task();

// Human-readable key=value round trip.
void save_task(const TaskSpec& task, const std::string& path);
TaskSpec load_task(const std::string& path);

// d/dt [x1, x2] = [x2, -0.0025 cos(3 x1) + 0.0015 u]
Eigen::Vector2d mountain_car_deriv(const Eigen::Vector2d& state, double u);

// Friction-less cart-pole, state [x, xdot, phi, phidot], phi = 0 upright.
Eigen::Vector4d cartpole_deriv(const Eigen::Vector4d& state, double u);

// Classical RK4 with zero-order hold on u.
Eigen::VectorXd rk4_step(const TaskSpec& task, const Eigen::VectorXd& state, double u);

// RK4 step plus additive process noise w ~ N(0, C_w) from the environment rng.
Eigen::VectorXd simulate_step(const Eigen::VectorXd& state, double u, const TaskSpec& task,
                              std::mt19937_64& env_rng);

// Maps a plant state into cost space (identity for mountain car; cart-pole is
// augmented to [x, xdot, cos(phi), sin(phi), phidot]).
Eigen::VectorXd cost_state(const TaskSpec& task, const Eigen::VectorXd& state);

double stage_cost(const Eigen::VectorXd& state, double u, const TaskSpec& task);
double terminal_cost(const Eigen::VectorXd& state, const TaskSpec& task);

struct RolloutResult {
    double cost = 0.0;  // +inf when the trajectory left the finite domain
    Eigen::MatrixXd states;  // (H+1) x d_x
};

// Deterministic (noise-free) forward simulation of a control sequence with
// summed stage costs plus terminal cost.
RolloutResult rollout(const Eigen::VectorXd& x0, const Eigen::VectorXd& sequence,
                      const TaskSpec& task);
double rollout_cost(const Eigen::VectorXd& x0, const Eigen::VectorXd& sequence,
                    const TaskSpec& task);

// Per-time-step log of one closed-loop run.
struct RunRecord {
    std::vector<Eigen::VectorXd> states;   // realized states x_0 .. x_{T-1}
    std::vector<double> controls;          // applied u_0 .. u_{T-1}
    std::vector<double> stage_costs;       // g(x_k, u_k) on realized states
    double cumulative_cost = 0.0;
    double smoothness = 0.0;
    bool success = false;
    long rollouts = 0;                     // trajectory-shooting budget used
};

// S = sum_k |u_k - u_{k-1}|^2; zero for fewer than two controls.
double smoothness(const std::vector<double>& controls);

// Task-specific success flags used for failure-rate reporting.
bool run_success(const TaskSpec& task, const RunRecord& record);

Eigen::VectorXd sample_initial_state(const TaskSpec& task, std::mt19937_64& env_rng);

}  // namespace dscem
