#pragma once

#include <algorithm>
#include <optional>

#include "errors.hpp"
#include "params.hpp"
#include "state.hpp"

namespace scirs {

/// Equilibria are accepted when the vector field's max-norm there is at most
/// this fraction of A/mu.
inline constexpr double kEquilibriumResidualTol = 1e-9;

/// a*delta*(A + N*eps) / ((b_I + mu)(v + eps + mu)),  N* = A/mu.
inline double reproduction_number(const ModelParams& p) {
    validate(p);
    return p.a * p.delta * (p.A + p.n_star() * p.epsilon) / ((p.b_I + p.mu) * (p.v + p.epsilon + p.mu));
}

/// Disease-free equilibrium (S0, 0, 0) of the limit system.
inline StateSCI dfe(const ModelParams& p) {
    validate(p);
    return {(p.A + p.n_star() * p.epsilon) / (p.v + p.epsilon + p.mu), 0.0, 0.0};
}

namespace detail {

// Shared factors of the endemic closed forms. `bracket` is negative exactly
// when R0 > 1.
struct EndemicFactors {
    double bracket;
    double denom;
};

inline EndemicFactors endemic_factors(const ModelParams& p) {
    const double veps = p.v + p.epsilon + p.mu;
    const double bracket = -p.a * p.delta * (p.A + p.n_star() * p.epsilon) + p.b_I * veps + p.mu * veps;
    const double denom = p.mu * (p.epsilon + p.mu) + p.b_I * (p.epsilon - p.delta * p.epsilon + p.mu) +
                         p.b_C * (p.b_I + p.delta * p.epsilon + p.mu);
    return {bracket, denom};
}

inline void require_endemic(const ModelParams& p) {
    const double r0 = reproduction_number(p);
    if (!(r0 > 1.0)) throw NoEndemicEquilibrium(r0);
}

}  // namespace detail

/// Endemic equilibrium (S*, C*, I*) of the limit system. Requires R0 > 1.
inline StateSCI dee(const ModelParams& p) {
    detail::require_endemic(p);
    const auto [bracket, denom] = detail::endemic_factors(p);
    const double s = (p.b_I + p.mu) / (p.a * p.delta);
    const double c = (p.delta - 1.0) * (p.b_I + p.mu) * bracket / (p.a * p.delta * denom);
    const double i = -(p.b_C + p.mu) * bracket / (p.a * denom);
    return {s, c, i};
}

/// Eliminates C using the limit population A/mu.
inline StateSIR to_sir(const ModelParams& p, const StateSCI& s) {
    return {s.S, s.I, p.n_star() - s.S - s.C - s.I};
}

inline StateSCI to_sci(const ModelParams& p, const StateSIR& s) {
    return {s.S, p.n_star() - s.S - s.I - s.R, s.I};
}

/// (S, I, R) -> (delta*S + I, I, R).
inline StateMIR to_mir(const ModelParams& p, const StateSIR& s) {
    return {p.delta * s.S + s.I, s.I, s.R};
}

inline StateSIR from_mir(const ModelParams& p, const StateMIR& s) {
    return {(s.M - s.I) / p.delta, s.I, s.R};
}

/// Endemic equilibrium (M2*, I2*, R2*) of the transformed sub-model. Requires R0 > 1.
inline StateMIR transformed_dee(const ModelParams& p) {
    detail::require_endemic(p);
    const auto [bracket, denom] = detail::endemic_factors(p);
    const StateSCI e = dee(p);
    const double i = -(p.b_C + p.mu) * bracket / (p.a * denom);
    const double m = (p.b_I + p.mu) / p.a + i;
    return {m, i, p.n_star() - e.S - e.I - e.C};
}

// ---------------------------------------------------------------------------
// Vector fields

inline StateSCIRN vf_full(const ModelParams& p, const StateSCIRN& s) {
    const double inc = p.a * s.I * s.S;
    return {
        p.A + p.epsilon * s.R - inc - p.v * s.S - p.mu * s.S,
        (1.0 - p.delta) * inc - p.b_C * s.C - p.mu * s.C,
        p.delta * inc - p.b_I * s.I - p.mu * s.I,
        p.b_C * s.C + p.b_I * s.I + p.v * s.S - p.epsilon * s.R - p.mu * s.R,
        p.A - p.mu * s.N,
    };
}

inline StateSCI vf_limit(const ModelParams& p, const StateSCI& s) {
    const double inc = p.a * s.I * s.S;
    return {
        p.A + p.epsilon * (p.n_star() - s.S - s.C - s.I) - inc - p.v * s.S - p.mu * s.S,
        (1.0 - p.delta) * inc - p.b_C * s.C - p.mu * s.C,
        p.delta * inc - p.b_I * s.I - p.mu * s.I,
    };
}

inline StateSIR vf_sir(const ModelParams& p, const StateSIR& s) {
    const double c = p.n_star() - s.S - s.I - s.R;
    return {
        p.A + p.epsilon * s.R - p.a * s.I * s.S - p.v * s.S - p.mu * s.S,
        p.a * p.delta * s.I * s.S - p.b_I * s.I - p.mu * s.I,
        p.b_C * c + p.b_I * s.I + p.v * s.S - p.epsilon * s.R - p.mu * s.R,
    };
}

inline StateMIR vf_mir(const ModelParams& p, const StateMIR& s) {
    const double susceptible = (s.M - s.I) / p.delta;
    return {
        p.delta * p.A + p.delta * p.epsilon * s.R - (p.v + p.mu) * s.M + (p.v - p.b_I) * s.I,
        p.a * (s.M - s.I) * s.I - p.b_I * s.I - p.mu * s.I,
        p.b_C * (p.n_star() - susceptible - s.I - s.R) + p.b_I * s.I + p.v * susceptible -
            p.epsilon * s.R - p.mu * s.R,
    };
}

// ---------------------------------------------------------------------------
// Feasible sets. Components in [-1e-12, 0) count as zero.

inline bool in_omega(const ModelParams& p, const StateSCI& raw, double slack = 0.0) {
    const StateSCI s = clamp_roundoff(raw);
    return s.S >= 0.0 && s.C >= 0.0 && s.I >= 0.0 && s.S + s.C + s.I <= p.n_star() + slack;
}

inline bool in_omega_star(const ModelParams& p, const StateMIR& raw, double slack = 0.0) {
    const StateMIR s = clamp_roundoff(raw);
    return s.M >= 0.0 && s.M <= p.n_star() + slack && s.I >= 0.0 && s.R >= 0.0 &&
           s.I + s.R <= p.n_star() + slack;
}

// ---------------------------------------------------------------------------

struct EquilibriumResiduals {
    double dfe = 0.0;
    std::optional<double> dee;
    std::optional<double> dee_sir;
    std::optional<double> dee_mir;

    double worst() const {
        return std::max({dfe, dee.value_or(0.0), dee_sir.value_or(0.0), dee_mir.value_or(0.0)});
    }
};

struct EquilibriumReport {
    double r0 = 0.0;
    StateSCI dfe;
    std::optional<StateSCI> dee;
    std::optional<StateSIR> dee_sir;
    std::optional<StateMIR> dee_mir;
    EquilibriumResiduals residual_norm;
};

/// R0, both equilibria in every formulation, and the vector-field residual at each.
inline EquilibriumReport equilibrium_report(const ModelParams& p) {
    EquilibriumReport rep;
    rep.r0 = reproduction_number(p);
    rep.dfe = scirs::dfe(p);
    rep.residual_norm.dfe = max_norm(vf_limit(p, rep.dfe));
    if (rep.r0 > 1.0) {
        rep.dee = scirs::dee(p);
        rep.dee_sir = to_sir(p, *rep.dee);
        rep.dee_mir = transformed_dee(p);
        rep.residual_norm.dee = max_norm(vf_limit(p, *rep.dee));
        rep.residual_norm.dee_sir = max_norm(vf_sir(p, *rep.dee_sir));
        rep.residual_norm.dee_mir = max_norm(vf_mir(p, *rep.dee_mir));
    }
    return rep;
}

}  // namespace scirs
