#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace scirs;
using namespace scirs::testing;
using Catch::Approx;

namespace {

// Unit death rate so the step error dominates roundoff over short horizons.
ModelParams fast_params() { return {2.0, 0.3, 0.2, 0.5, 1.0, 0.6, 0.4, 0.3}; }

template <ModelState State>
IntegrationConfig<State> config(double h, double t_end, std::size_t stride = 1) {
    IntegrationConfig<State> c;
    c.h = h;
    c.t_end = t_end;
    c.record_stride = stride;
    return c;
}

double fitted_slope(const std::vector<double>& hs, const std::vector<double>& errs) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const double x = std::log(hs[i]), y = std::log(errs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("zero field leaves the state unchanged", "[integrator]") {
    const auto zero = [](const StateSCI&) { return StateSCI{0, 0, 0}; };
    const StateSCI s{1.5, 2.5, 3.5};
    CHECK(rk4_step(zero, s, 0.1) == s);
    const auto traj = integrate(zero, s, config<StateSCI>(0.1, 5.0, 10));
    CHECK(traj.final_state == s);
    CHECK(traj.times.size() == 6);
    CHECK(traj.times.back() == Approx(5.0));
}

TEST_CASE("one RK4 step on the population equation", "[integrator]") {
    // N' = A - mu N is linear, so one step equals the degree-4 Taylor polynomial of exp.
    const ModelParams p = fast_params();
    const StateSCIRN s0{0.5, 0.2, 0.1, 0.2, 1.0};
    const double h = 0.1;
    const StateSCIRN s1 = rk4_step([&](const StateSCIRN& s) { return vf_full(p, s); }, s0, h);
    const double z = -p.mu * h;
    const double poly = 1 + z + z * z / 2 + z * z * z / 6 + z * z * z * z / 24;
    const double want = p.n_star() + (s0.N - p.n_star()) * poly;
    CHECK(s1.N == Approx(want).epsilon(1e-14));
}

TEST_CASE("RK4 converges at fourth order", "[integrator][order]") {
    const ModelParams p = fast_params();
    const auto field = [&](const StateSCIRN& s) { return vf_full(p, s); };
    const StateSCIRN s0{0.5, 0.2, 0.1, 0.2, 0.3};
    const double t_end = 2.0;

    const std::vector<double> hs = {0.1, 0.05, 0.025, 0.0125};
    std::vector<double> n_err, richardson;
    for (double h : hs) {
        const auto coarse = integrate(field, s0, config<StateSCIRN>(h, t_end, 1000000));
        const auto fine = integrate(field, s0, config<StateSCIRN>(h / 2, t_end, 1000000));
        const double exact_n = p.n_star() + (s0.N - p.n_star()) * std::exp(-p.mu * t_end);
        n_err.push_back(std::abs(coarse.final_state.N - exact_n));
        richardson.push_back(max_distance(coarse.final_state, fine.final_state));
    }
    CHECK(fitted_slope(hs, n_err) == Approx(4.0).margin(0.1));
    CHECK(fitted_slope(hs, richardson) == Approx(4.0).margin(0.1));
}

TEST_CASE("Case 1 converges to the endemic equilibrium", "[integrator][convergence]") {
    const ModelParams p = case1();
    IntegrationConfig<StateSCIRN> cfg;
    cfg.convergence_target = lift_to_full(p, dee(p));
    const auto traj = integrate([&](const StateSCIRN& s) { return vf_full(p, s); },
                                StateSCIRN{150, 20, 20, 10, 200}, cfg);
    CHECK(max_distance(traj.final_state, *cfg.convergence_target) < 1e-3);
    REQUIRE(traj.converged_at);
    CHECK(*traj.converged_at < 2000.0);
    CHECK(traj.final_time == Approx(2000.0));
    CHECK(traj.times.size() == 2001);
}

TEST_CASE("Case 2 converges on the limit system", "[integrator][convergence]") {
    const ModelParams p = case2();
    const StateSCI e = dee(p);
    for (const StateSCI& s0 : sample_omega(p, 4, 2)) {
        const auto traj = integrate([&](const StateSCI& s) { return vf_limit(p, s); }, s0,
                                    config<StateSCI>(1e-2, 2000.0, 100));
        CHECK(max_distance(traj.final_state, e) < 1e-2);
    }
}

TEST_CASE("equilibria are stationary", "[integrator]") {
    const ModelParams p = case1();
    const StateSCI e0 = dfe(p);
    const auto traj = integrate([&](const StateSCI& s) { return vf_limit(p, s); }, e0,
                                config<StateSCI>(1e-2, 200.0, 100));
    CHECK(max_distance(traj.final_state, e0) < 1e-9);

    const StateSCI e1 = dee(p);
    const auto t1 = integrate([&](const StateSCI& s) { return vf_limit(p, s); }, e1,
                              config<StateSCI>(1e-2, 200.0, 100));
    CHECK(max_distance(t1.final_state, e1) < 1e-8);
}

TEST_CASE("population conservation and closed-form N", "[integrator][property]") {
    ParamSampler gen(41);
    for (int k = 0; k < 30; ++k) {
        const ModelParams p = gen.any();
        const StateSCI base = sample_omega(p, 1, k)[0];
        const double n0 = 0.7 * p.n_star();
        const StateSCIRN s0{0.7 * base.S, 0.7 * base.C, 0.7 * base.I,
                            n0 - 0.7 * (base.S + base.C + base.I), n0};
        const double t_end = 50.0;
        const auto traj = integrate([&](const StateSCIRN& s) { return vf_full(p, s); }, s0,
                                    config<StateSCIRN>(1e-2, t_end, 100));
        for (std::size_t i = 0; i < traj.states.size(); ++i) {
            const StateSCIRN& s = traj.states[i];
            CHECK(std::abs(s.S + s.C + s.I + s.R - s.N) <= 1e-6 * n0);
            const double exact = p.n_star() + (n0 - p.n_star()) * std::exp(-p.mu * traj.times[i]);
            CHECK(std::abs(s.N - exact) <= 1e-8 * p.n_star());
        }
    }
}

TEST_CASE("feasible region is forward invariant", "[integrator][property]") {
    ParamSampler gen(42);
    for (int k = 0; k < 40; ++k) {
        const ModelParams p = gen.any();
        const double h = std::min(0.05, 0.1 / (p.a * p.n_star() + p.b_I + p.b_C + p.epsilon + p.v + p.mu));
        for (const StateSCI& s0 : sample_omega(p, 3, 500 + k)) {
            const auto traj = integrate([&](const StateSCI& s) { return vf_limit(p, s); }, s0,
                                        config<StateSCI>(h, 20.0, 10));
            for (const StateSCI& s : traj.states) CHECK(in_omega(p, s, 1e-9 * p.n_star()));
        }
    }
}

TEST_CASE("sub-model and transformed flows commute", "[integrator][property]") {
    ParamSampler gen(43);
    for (int k = 0; k < 30; ++k) {
        const ModelParams p = gen.any();
        const StateSIR s0 = to_sir(p, sample_omega(p, 1, k)[0]);
        const auto cfg_sir = config<StateSIR>(1e-2, 20.0, 100);
        const auto cfg_mir = config<StateMIR>(1e-2, 20.0, 100);
        const auto a = integrate([&](const StateSIR& s) { return vf_sir(p, s); }, s0, cfg_sir);
        const auto b = integrate([&](const StateMIR& s) { return vf_mir(p, s); }, to_mir(p, s0), cfg_mir);
        REQUIRE(a.states.size() == b.states.size());
        for (std::size_t i = 0; i < a.states.size(); ++i)
            CHECK(max_distance(to_mir(p, a.states[i]), b.states[i]) <= 1e-6 * std::max(1.0, p.n_star()));
    }
}

TEST_CASE("sampling the feasible region", "[integrator][sampling]") {
    const ModelParams p = case1();
    const auto pts = sample_omega(p, 20000, 7);
    double mean = 0.0;
    for (const StateSCI& s : pts) {
        CHECK(in_omega(p, s));
        mean += (s.S + s.C + s.I) / p.n_star();
    }
    mean /= static_cast<double>(pts.size());
    CHECK(mean == Approx(0.75).epsilon(0.05));
    CHECK(sample_omega(p, 10, 3) == sample_omega(p, 10, 3));
    CHECK_FALSE(sample_omega(p, 10, 3) == sample_omega(p, 10, 4));
    CHECK_THROWS_AS(sample_omega(p, 0, 1), std::invalid_argument);
}

TEST_CASE("convergence time", "[integrator]") {
    Trajectory<StateSCI> traj;
    traj.times = {0, 1, 2, 3};
    traj.states = {{5, 0, 0}, {2, 0, 0}, {1.0005, 0, 0}, {1, 0, 0}};
    CHECK(converge_time(traj, StateSCI{1, 0, 0}, 1e-3) == 2.0);
    CHECK_FALSE(converge_time(traj, StateSCI{9, 0, 0}, 1e-3));
}

TEST_CASE("batch integration is deterministic and ordered", "[integrator]") {
    const ModelParams p = case1();
    const auto starts = sample_omega(p, 6, 11);
    const auto field = [&](const StateSCI& s) { return vf_limit(p, s); };
    const auto cfg = config<StateSCI>(1e-2, 50.0, 100);
    const auto batch = integrate_batch(field, starts, cfg);
    REQUIRE(batch.size() == starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const auto single = integrate(field, starts[i], cfg);
        CHECK(batch[i].states == single.states);
        CHECK(batch[i].times == single.times);
    }
}

TEST_CASE("non-finite states are reported", "[integrator][errors]") {
    const auto blowup = [](const StateSCI& s) { return StateSCI{s.S * s.S, 0, 0}; };
    try {
        integrate(blowup, StateSCI{10, 0, 0}, config<StateSCI>(0.5, 100.0));
        FAIL("expected NonFiniteState");
    } catch (const NonFiniteState& e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() <= 100.0);
    }
    CHECK_THROWS_AS(integrate(blowup, StateSCI{std::nan(""), 0, 0}, config<StateSCI>(0.5, 1.0)), NonFiniteState);

    const ModelParams p = case1();
    CHECK_THROWS_AS(integrate([&](const StateSCI& s) { return vf_limit(p, s); }, StateSCI{150, 20, 20},
                              config<StateSCI>(1e4, 1e6, 1)),
                    NonFiniteState);
}

TEST_CASE("integration config validation", "[integrator][errors]") {
    const auto zero = [](const StateSCI&) { return StateSCI{}; };
    CHECK_THROWS_AS(integrate(zero, StateSCI{}, config<StateSCI>(0.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(integrate(zero, StateSCI{}, config<StateSCI>(-1.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(integrate(zero, StateSCI{}, config<StateSCI>(0.1, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(integrate(zero, StateSCI{}, config<StateSCI>(0.1, 1.0, 0)), std::invalid_argument);
    CHECK(IntegrationConfig<StateSCI>::unit_time_stride(1e-3) == 1000);
    CHECK(IntegrationConfig<StateSCI>::unit_time_stride(2.0) == 1);
    CHECK(config<StateSCI>(0.1, 1.0).steps() == 10);
}
