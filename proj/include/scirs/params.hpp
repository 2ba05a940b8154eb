#pragma once

#include <array>
#include <cmath>
#include <string_view>

#include "errors.hpp"

namespace scirs {

/// Rates of one SCIRS model instance.
///
/// Units: `A` nodes/time, `a` 1/(node*time), `delta` dimensionless,
/// everything else 1/time.
struct ModelParams {
    double A = 0.0;        ///< node recruitment
    double epsilon = 0.0;  ///< loss of immunity (R -> S)
    double a = 0.0;        ///< transmission coefficient
    double v = 0.0;        ///< vaccination (S -> R)
    double mu = 0.0;       ///< death / retirement
    double delta = 0.0;    ///< fraction of new infections that are infectious
    double b_I = 0.0;      ///< recovery of infectious nodes
    double b_C = 0.0;      ///< recovery of carrier nodes

    /// Asymptotic total population A/mu.
    double n_star() const noexcept { return A / mu; }

    bool operator==(const ModelParams&) const = default;
};

/// Params-file key spellings, in declaration order.
inline constexpr std::array<std::string_view, 8> kParamNames = {
    "A", "epsilon", "a", "v", "mu", "delta", "b_I", "b_C"};

inline constexpr std::array<double ModelParams::*, 8> kParamMembers = {
    &ModelParams::A,     &ModelParams::epsilon, &ModelParams::a,   &ModelParams::v,
    &ModelParams::mu,    &ModelParams::delta,   &ModelParams::b_I, &ModelParams::b_C};

/// Index into kParamNames, or -1.
inline int param_index(std::string_view name) {
    for (std::size_t i = 0; i < kParamNames.size(); ++i)
        if (kParamNames[i] == name) return static_cast<int>(i);
    return -1;
}

/// Throws ParameterError unless every rate is finite and strictly positive
/// and 0 < delta < 1.
inline void validate(const ModelParams& p) {
    for (std::size_t i = 0; i < kParamNames.size(); ++i) {
        const double x = p.*kParamMembers[i];
        const std::string name(kParamNames[i]);
        if (!std::isfinite(x)) throw ParameterError(name, name + " must be finite");
        if (!(x > 0.0)) throw ParameterError(name, name + " must be strictly positive");
    }
    if (!(p.delta < 1.0)) throw ParameterError("delta", "delta must lie in the open interval (0, 1)");
}

inline ModelParams validated(const ModelParams& p) {
    validate(p);
    return p;
}

}  // namespace scirs
