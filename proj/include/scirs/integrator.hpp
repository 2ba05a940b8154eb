#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "params.hpp"
#include "state.hpp"

namespace scirs {

template <ModelState State>
struct IntegrationConfig {
    double h = 1e-3;
    double t_end = 2000.0;
    std::size_t record_stride = 1000;  ///< steps between recorded samples
    double convergence_tol = 1e-3;     ///< max-norm distance to the target
    std::optional<State> convergence_target;

    /// Stride giving one sample per unit of model time.
    static std::size_t unit_time_stride(double h) {
        return static_cast<std::size_t>(std::max(1.0, std::round(1.0 / h)));
    }

    std::uint64_t steps() const { return static_cast<std::uint64_t>(std::ceil(t_end / h - 1e-9)); }

    void validate() const {
        if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size h must be positive");
        if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be positive");
        if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
    }
};

template <ModelState State>
struct Trajectory {
    static constexpr std::size_t dimension = StateTraits<State>::dim;

    std::vector<double> times;
    std::vector<State> states;
    std::optional<double> converged_at;
    double final_time = 0.0;  ///< last integrated time, recorded or not
    State final_state{};
};

namespace detail {

template <class Array>
Array axpy(const Array& x, double a, const Array& y) {
    Array r;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = x[i] + a * y[i];
    return r;
}

}  // namespace detail

/// One classical RK4 step of the autonomous system s' = field(s).
/// `t` only labels a NonFiniteState error.
template <ModelState State, class Field>
State rk4_step(const Field& field, const State& s, double h, double t = 0.0) {
    using T = StateTraits<State>;
    auto eval = [&](const typename std::array<double, T::dim>& x) {
        return T::to_array(field(T::from_array(x)));
    };
    const auto x = T::to_array(s);
    const auto k1 = eval(x);
    const auto k2 = eval(detail::axpy(x, 0.5 * h, k1));
    const auto k3 = eval(detail::axpy(x, 0.5 * h, k2));
    const auto k4 = eval(detail::axpy(x, h, k3));
    std::array<double, T::dim> out;
    for (std::size_t i = 0; i < T::dim; ++i) {
        out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(out[i])) throw NonFiniteState(t + h);
    }
    return T::from_array(out);
}

/// First recorded time within `tol` (max-norm) of `target`.
template <ModelState State>
std::optional<double> converge_time(const Trajectory<State>& traj, const State& target, double tol) {
    for (std::size_t k = 0; k < traj.states.size(); ++k)
        if (max_distance(traj.states[k], target) <= tol) return traj.times[k];
    return std::nullopt;
}

/// Fixed-step RK4 from t = 0 to cfg.t_end, recording every record_stride-th state
/// (t = 0 included).
template <ModelState State, class Field>
Trajectory<State> integrate(const Field& field, const State& s0, const IntegrationConfig<State>& cfg) {
    cfg.validate();
    if (!all_finite(s0)) throw NonFiniteState(0.0);

    Trajectory<State> traj;
    const std::uint64_t n = cfg.steps();
    traj.times.reserve(n / cfg.record_stride + 1);
    traj.states.reserve(n / cfg.record_stride + 1);

    State s = s0;
    traj.times.push_back(0.0);
    traj.states.push_back(s);
    for (std::uint64_t k = 1; k <= n; ++k) {
        s = rk4_step(field, s, cfg.h, static_cast<double>(k - 1) * cfg.h);
        if (k % cfg.record_stride == 0) {
            traj.times.push_back(static_cast<double>(k) * cfg.h);
            traj.states.push_back(s);
        }
    }
    traj.final_time = static_cast<double>(n) * cfg.h;
    traj.final_state = s;
    if (cfg.convergence_target)
        traj.converged_at = converge_time(traj, *cfg.convergence_target, cfg.convergence_tol);
    return traj;
}

/// integrate() over several initial states concurrently; output order follows input order.
template <ModelState State, class Field>
std::vector<Trajectory<State>> integrate_batch(const Field& field, const std::vector<State>& starts,
                                               const IntegrationConfig<State>& cfg) {
    std::vector<std::future<Trajectory<State>>> jobs;
    jobs.reserve(starts.size());
    for (const State& s0 : starts)
        jobs.push_back(std::async(std::launch::async, [&field, &cfg, s0] { return integrate(field, s0, cfg); }));
    std::vector<Trajectory<State>> out;
    out.reserve(starts.size());
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

/// `n` points uniform on {S, C, I >= 0, S + C + I <= A/mu}, deterministic per seed.
/// Spacings of three sorted uniforms are uniform on the corner simplex.
inline std::vector<StateSCI> sample_omega(const ModelParams& p, std::size_t n, std::uint64_t seed) {
    validate(p);
    if (n < 1) throw std::invalid_argument("sample_omega needs n >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double cap = p.n_star();
    std::vector<StateSCI> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::array<double, 3> u = {unit(rng), unit(rng), unit(rng)};
        std::sort(u.begin(), u.end());
        out.push_back({cap * u[0], cap * (u[1] - u[0]), cap * (u[2] - u[1])});
    }
    return out;
}

/// Full-system state on the limit manifold N = A/mu.
inline StateSCIRN lift_to_full(const ModelParams& p, const StateSCI& s) {
    const double n = p.n_star();
    return {s.S, s.C, s.I, n - s.S - s.C - s.I, n};
}

}  // namespace scirs
