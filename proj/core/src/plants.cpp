#include "dscem/plants.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dscem {
namespace {

constexpr double kCartMass = 1.0;
constexpr double kPoleMass = 0.1;
constexpr double kPoleLength = 0.5;
constexpr double kGravity = 9.81;

Eigen::VectorXd deriv(const TaskSpec& task, const Eigen::VectorXd& state, double u) {
    if (task.dynamics == PlantId::MountainCar) return mountain_car_deriv(state, u);
    if (task.dynamics == PlantId::Integrator) return Eigen::VectorXd::Constant(1, u);
    return cartpole_deriv(state, u);
}

std::string vec_to_string(const Eigen::VectorXd& v) {
    std::ostringstream os;
    os.precision(17);
    for (int i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << v[i];
    }
    return os.str();
}

Eigen::VectorXd vec_from_string(const std::string& s) {
    std::vector<double> vals;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
    return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<int>(vals.size()));
}

}  // namespace

TaskSpec mountain_car_task() {
    TaskSpec t;
    t.dynamics = PlantId::MountainCar;
    t.dt = 3.0;
    t.horizon = 30;
    t.total_steps = 150;
    t.control_dim = 1;
    t.u_min = Eigen::VectorXd::Constant(1, -1.0);
    t.u_max = Eigen::VectorXd::Constant(1, 1.0);
    t.q_weights = Eigen::Vector2d(1.0, 1.0);
    t.r_weight = 0.1;
    t.q_terminal = Eigen::Vector2d(1.0, 1.0);
    t.goal = Eigen::Vector2d(M_PI / 2.0, 0.0);
    t.process_noise = Eigen::Vector2d(0.0, 1e-7);
    t.noise_beta = 0.25;
    t.sigma0 = 1.5;
    t.init_state_lo = Eigen::Vector2d(-0.7, 0.0);
    t.init_state_hi = Eigen::Vector2d(-0.3, 0.0);
    return t;
}

TaskSpec cart_pole_task() {
    TaskSpec t;
    t.dynamics = PlantId::CartPole;
    t.dt = 0.02;
    t.horizon = 30;
    t.total_steps = 300;
    t.control_dim = 1;
    t.u_min = Eigen::VectorXd::Constant(1, -10.0);
    t.u_max = Eigen::VectorXd::Constant(1, 10.0);
    t.q_weights = (Eigen::VectorXd(5) << 0.1, 0.1, 1.0, 0.1, 0.1).finished();
    t.r_weight = 1e-4;
    t.q_terminal = (Eigen::VectorXd(5) << 10.0, 0.1, 10.0, 0.1, 0.1).finished();
    t.goal = (Eigen::VectorXd(5) << 0.0, 0.0, 1.0, 0.0, 0.0).finished();
    t.process_noise = (Eigen::VectorXd(4) << 0.0, 1e-8, 0.0, 1e-8).finished();
    t.noise_beta = 1.0;
    t.sigma0 = 10.0;
    const double lo = 145.0 * M_PI / 180.0;
    const double hi = 215.0 * M_PI / 180.0;
    t.init_state_lo = (Eigen::VectorXd(4) << 0.0, 0.0, lo, 0.0).finished();
    t.init_state_hi = (Eigen::VectorXd(4) << 0.0, 0.0, hi, 0.0).finished();
    return t;
}

TaskSpec integrator_task() {
    TaskSpec t;
    t.dynamics = PlantId::Integrator;
    t.dt = 1.0;
    t.horizon = 2;
    t.total_steps = 10;
    t.control_dim = 1;
    t.u_min = Eigen::VectorXd::Constant(1, -1.0);
    t.u_max = Eigen::VectorXd::Constant(1, 1.0);
    t.q_weights = Eigen::VectorXd::Constant(1, 1.0);
    t.r_weight = 0.1;
    t.q_terminal = Eigen::VectorXd::Constant(1, 1.0);
    t.goal = Eigen::VectorXd::Zero(1);
    t.process_noise = Eigen::VectorXd::Zero(1);
    t.noise_beta = 0.0;
    t.sigma0 = 1.0;
    t.init_state_lo = Eigen::VectorXd::Constant(1, 1.0);
    t.init_state_hi = Eigen::VectorXd::Constant(1, 1.0);
    return t;
}

Eigen::Vector2d mountain_car_deriv(const Eigen::Vector2d& state, double u) {
    return {state[1], -0.0025 * std::cos(3.0 * state[0]) + 0.0015 * u};
}

Eigen::Vector4d cartpole_deriv(const Eigen::Vector4d& state, double u) {
    const double phi = state[2];
    const double phidot = state[3];
    const double sin_phi = std::sin(phi);
    const double cos_phi = std::cos(phi);
    const double total_mass = kPoleMass + kCartMass;

    const double tmp = (u + kPoleMass * kPoleLength * phidot * phidot * sin_phi) / total_mass;
    const double phi_dd = (kGravity * sin_phi - cos_phi * tmp) /
                          (kPoleLength * (4.0 / 3.0 - kPoleMass * cos_phi * cos_phi / total_mass));
    const double x_dd =
        (u + kPoleMass * kPoleLength * (phidot * phidot * sin_phi - phi_dd * cos_phi)) /
        total_mass;
    return {state[1], x_dd, phidot, phi_dd};
}

Eigen::VectorXd rk4_step(const TaskSpec& task, const Eigen::VectorXd& state, double u) {
    const double dt = task.dt;
    const Eigen::VectorXd k1 = deriv(task, state, u);
    const Eigen::VectorXd k2 = deriv(task, state + 0.5 * dt * k1, u);
    const Eigen::VectorXd k3 = deriv(task, state + 0.5 * dt * k2, u);
    const Eigen::VectorXd k4 = deriv(task, state + dt * k3, u);
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd simulate_step(const Eigen::VectorXd& state, double u, const TaskSpec& task,
                              std::mt19937_64& env_rng) {
    Eigen::VectorXd next = rk4_step(task, state, u);
    std::normal_distribution<double> normal;
    for (int i = 0; i < next.size(); ++i) {
        const double var = task.process_noise[i];
        if (var > 0.0) next[i] += std::sqrt(var) * normal(env_rng);
    }
    return next;
}

Eigen::VectorXd cost_state(const TaskSpec& task, const Eigen::VectorXd& state) {
    if (task.dynamics != PlantId::CartPole) return state;
    Eigen::VectorXd aug(5);
    aug << state[0], state[1], std::cos(state[2]), std::sin(state[2]), state[3];
    return aug;
}

double stage_cost(const Eigen::VectorXd& state, double u, const TaskSpec& task) {
    const Eigen::VectorXd err = cost_state(task, state) - task.goal;
    return err.dot(task.q_weights.asDiagonal() * err) + task.r_weight * u * u;
}

double terminal_cost(const Eigen::VectorXd& state, const TaskSpec& task) {
    const Eigen::VectorXd err = cost_state(task, state) - task.goal;
    return err.dot(task.q_terminal.asDiagonal() * err);
}

RolloutResult rollout(const Eigen::VectorXd& x0, const Eigen::VectorXd& sequence,
                      const TaskSpec& task) {
    const int h = static_cast<int>(sequence.size());
    RolloutResult result;
    result.states.resize(h + 1, x0.size());
    result.states.row(0) = x0;

    Eigen::VectorXd x = x0;
    double cost = 0.0;
    for (int n = 0; n < h; ++n) {
        cost += stage_cost(x, sequence[n], task);
        x = rk4_step(task, x, sequence[n]);
        result.states.row(n + 1) = x;
        if (!x.allFinite()) {
            result.cost = std::numeric_limits<double>::infinity();
            return result;
        }
    }
    cost += terminal_cost(x, task);
    result.cost = std::isfinite(cost) ? cost : std::numeric_limits<double>::infinity();
    return result;
}

double rollout_cost(const Eigen::VectorXd& x0, const Eigen::VectorXd& sequence,
                    const TaskSpec& task) {
    const int h = static_cast<int>(sequence.size());
    Eigen::VectorXd x = x0;
    double cost = 0.0;
    for (int n = 0; n < h; ++n) {
        cost += stage_cost(x, sequence[n], task);
        x = rk4_step(task, x, sequence[n]);
        if (!x.allFinite()) return std::numeric_limits<double>::infinity();
    }
    cost += terminal_cost(x, task);
    return std::isfinite(cost) ? cost : std::numeric_limits<double>::infinity();
}

double smoothness(const std::vector<double>& controls) {
    if (controls.size() < 2) return 0.0;
    double s = 0.0;
    for (std::size_t k = 1; k < controls.size(); ++k) {
        const double d = controls[k] - controls[k - 1];
        s += d * d;
    }
    return s;
}

bool run_success(const TaskSpec& task, const RunRecord& record) {
    if (record.states.empty()) return false;
    if (task.dynamics == PlantId::Integrator)
        return std::abs(record.states.back()[0] - task.goal[0]) < 0.05;
    if (task.dynamics == PlantId::MountainCar) {
        const Eigen::VectorXd& final_state = record.states.back();
        return std::abs(final_state[0] - M_PI / 2.0) < 0.05 && std::abs(final_state[1]) < 0.02;
    }
    const int window = std::min<int>(50, static_cast<int>(record.states.size()));
    double acc = 0.0;
    for (int k = 0; k < window; ++k) {
        const auto& x = record.states[record.states.size() - window + k];
        acc += 1.0 - std::cos(x[2]);
    }
    return acc / window < 0.1;
}

Eigen::VectorXd sample_initial_state(const TaskSpec& task, std::mt19937_64& env_rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd x(task.init_state_lo.size());
    for (int i = 0; i < x.size(); ++i) {
        const double lo = task.init_state_lo[i], hi = task.init_state_hi[i];
        x[i] = (lo == hi) ? lo : lo + (hi - lo) * unit(env_rng);
    }
    return x;
}

void save_task(const TaskSpec& task, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_task: cannot open " + path);
    out.precision(17);
    out << "# dscem task spec v1\n";
    const char* dyn_name = task.dynamics == PlantId::MountainCar  ? "mountain-car"
                           : task.dynamics == PlantId::Integrator ? "integrator"
                                                                  : "cart-pole";
    out << "dynamics = " << dyn_name << "\n";
    out << "dt = " << task.dt << "\n";
    out << "horizon = " << task.horizon << "\n";
    out << "total_steps = " << task.total_steps << "\n";
    out << "control_dim = " << task.control_dim << "\n";
    out << "u_min = " << vec_to_string(task.u_min) << "\n";
    out << "u_max = " << vec_to_string(task.u_max) << "\n";
    out << "q_weights = " << vec_to_string(task.q_weights) << "\n";
    out << "r_weight = " << task.r_weight << "\n";
    out << "q_terminal = " << vec_to_string(task.q_terminal) << "\n";
    out << "goal = " << vec_to_string(task.goal) << "\n";
    out << "process_noise = " << vec_to_string(task.process_noise) << "\n";
    out << "noise_beta = " << task.noise_beta << "\n";
    out << "sigma0 = " << task.sigma0 << "\n";
    out << "init_state_lo = " << vec_to_string(task.init_state_lo) << "\n";
    out << "init_state_hi = " << vec_to_string(task.init_state_hi) << "\n";
}

TaskSpec load_task(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_task: cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    const std::string dyn = kv.at("dynamics");
    TaskSpec t;
    if (dyn == "cart-pole")
        t = cart_pole_task();
    else if (dyn == "mountain-car")
        t = mountain_car_task();
    else if (dyn == "integrator")
        t = integrator_task();
    else
        throw std::runtime_error("load_task: unknown dynamics '" + dyn + "'");

    auto num = [&](const std::string& key, double& target) {
        if (kv.count(key)) target = std::stod(kv[key]);
    };
    auto integer = [&](const std::string& key, int& target) {
        if (kv.count(key)) target = std::stoi(kv[key]);
    };
    auto vec = [&](const std::string& key, Eigen::VectorXd& target) {
        if (kv.count(key)) target = vec_from_string(kv[key]);
    };
    num("dt", t.dt);
    integer("horizon", t.horizon);
    integer("total_steps", t.total_steps);
    integer("control_dim", t.control_dim);
    vec("u_min", t.u_min);
    vec("u_max", t.u_max);
    vec("q_weights", t.q_weights);
    num("r_weight", t.r_weight);
    vec("q_terminal", t.q_terminal);
    vec("goal", t.goal);
    vec("process_noise", t.process_noise);
    num("noise_beta", t.noise_beta);
    num("sigma0", t.sigma0);
    vec("init_state_lo", t.init_state_lo);
    vec("init_state_hi", t.init_state_hi);
    return t;
}

}  // namespace dscem
