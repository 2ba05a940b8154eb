#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string_view>

namespace scirs {

/// Full system: susceptible, carrier, infectious, recovered, total.
struct StateSCIRN {
    double S = 0, C = 0, I = 0, R = 0, N = 0;
    bool operator==(const StateSCIRN&) const = default;
};

/// Limit system on N = A/mu.
struct StateSCI {
    double S = 0, C = 0, I = 0;
    bool operator==(const StateSCI&) const = default;
};

/// Sub-model with C eliminated through C = A/mu - S - I - R.
struct StateSIR {
    double S = 0, I = 0, R = 0;
    bool operator==(const StateSIR&) const = default;
};

/// Transformed sub-model, M = delta*S + I.
struct StateMIR {
    double M = 0, I = 0, R = 0;
    bool operator==(const StateMIR&) const = default;
};

/// Maps each state struct to a fixed-size array and back, plus CSV column names.
template <class State>
struct StateTraits;

template <>
struct StateTraits<StateSCIRN> {
    static constexpr std::size_t dim = 5;
    static constexpr std::array<std::string_view, dim> names = {"S", "C", "I", "R", "N"};
    static std::array<double, dim> to_array(const StateSCIRN& s) { return {s.S, s.C, s.I, s.R, s.N}; }
    static StateSCIRN from_array(const std::array<double, dim>& x) { return {x[0], x[1], x[2], x[3], x[4]}; }
};

template <>
struct StateTraits<StateSCI> {
    static constexpr std::size_t dim = 3;
    static constexpr std::array<std::string_view, dim> names = {"S", "C", "I"};
    static std::array<double, dim> to_array(const StateSCI& s) { return {s.S, s.C, s.I}; }
    static StateSCI from_array(const std::array<double, dim>& x) { return {x[0], x[1], x[2]}; }
};

template <>
struct StateTraits<StateSIR> {
    static constexpr std::size_t dim = 3;
    static constexpr std::array<std::string_view, dim> names = {"S", "I", "R"};
    static std::array<double, dim> to_array(const StateSIR& s) { return {s.S, s.I, s.R}; }
    static StateSIR from_array(const std::array<double, dim>& x) { return {x[0], x[1], x[2]}; }
};

template <>
struct StateTraits<StateMIR> {
    static constexpr std::size_t dim = 3;
    static constexpr std::array<std::string_view, dim> names = {"M", "I", "R"};
    static std::array<double, dim> to_array(const StateMIR& s) { return {s.M, s.I, s.R}; }
    static StateMIR from_array(const std::array<double, dim>& x) { return {x[0], x[1], x[2]}; }
};

template <class State>
concept ModelState = requires(const State& s) {
    { StateTraits<State>::to_array(s) };
    { StateTraits<State>::dim };
};

template <class State>
double max_norm(const State& s) {
    double m = 0.0;
    for (double x : StateTraits<State>::to_array(s)) m = std::max(m, std::abs(x));
    return m;
}

template <class State>
double max_distance(const State& a, const State& b) {
    const auto x = StateTraits<State>::to_array(a);
    const auto y = StateTraits<State>::to_array(b);
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

template <class State>
bool all_finite(const State& s) {
    for (double x : StateTraits<State>::to_array(s))
        if (!std::isfinite(x)) return false;
    return true;
}

/// Components in [-1e-12, 0) are integration roundoff; snap them to zero.
inline constexpr double kRoundoffFloor = -1e-12;

template <class State>
State clamp_roundoff(const State& s) {
    auto x = StateTraits<State>::to_array(s);
    for (double& c : x)
        if (c < 0.0 && c >= kRoundoffFloor) c = 0.0;
    return StateTraits<State>::from_array(x);
}

}  // namespace scirs
