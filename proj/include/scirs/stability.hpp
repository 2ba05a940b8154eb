#pragma once

// Volterra-Lyapunov analysis of the endemic equilibrium.
//
// The deviation vector is X = [R - R2*, M - M2*, I - I2*] and the Lyapunov
// candidate is
//
//   V = tau1 (R - R2*)^2 + tau2 (M - M2*)^2 + 2 tau3 (I - I2* - I2* ln(I / I2*)).
//
// Along the transformed flow dV/dt = X (Q D + D Q^T) X^T with Q from build_q()
// and D = diag(tau1, tau2, tau3), so any positive diagonal D making
// Q D + D Q^T negative definite yields a strict Lyapunov function.
//
// For 3x3 matrices such a D exists iff Q is in class P (all signed principal
// minors positive) and some y > 0 makes both
//
//   p1(y) = (q13 y + q31)^2 - 4 q11 q33 y
//   p2(y) = (b1 y + b2)^2 - 4 M12 M23 y,   b1 = q12 q23 - q22 q13,
//                                          b2 = q21 q32 - q22 q31
//
// negative. For Q these sets are (y1*, inf) and an open interval (lo, hi),
// which meet iff y1* < hi.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix3.hpp"
#include "model.hpp"
#include "params.hpp"
#include "state.hpp"

namespace scirs {

/// Principal minors of a 3x3 matrix, indexed one-based like M_{ij}.
struct MinorSet {
    double m1 = 0, m2 = 0, m3 = 0;
    double m12 = 0, m13 = 0, m23 = 0;
    double m123 = 0;

    /// (-1)^order * minor, in the order m1, m2, m3, m12, m13, m23, m123.
    std::array<double, 7> signed_values() const { return {-m1, -m2, -m3, m12, m13, m23, -m123}; }
};

struct SignedMinors {
    MinorSet minors;
    bool all_positive = false;  ///< class P
    bool p0_plus = false;       ///< all >= 0, at least one > 0 of each order
};

/// Open interval (lo, hi); hi may be +inf.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty = true;

    static Interval open(double lo, double hi) { return {lo, hi, !(lo < hi)}; }
    static Interval none() { return {}; }

    bool contains(double y) const { return !empty && lo < y && y < hi; }

    Interval intersect(const Interval& o) const {
        if (empty || o.empty) return none();
        return open(std::max(lo, o.lo), std::min(hi, o.hi));
    }

    /// Midpoint; for an unbounded interval a point safely inside it.
    double midpoint() const {
        if (std::isinf(hi)) return lo > 0.0 ? 2.0 * lo : lo + 1.0;
        return lo + 0.5 * (hi - lo);
    }
};

// ---------------------------------------------------------------------------
// Matrix-level predicates

inline SignedMinors signed_principal_minors(const Matrix3& m) {
    SignedMinors out;
    MinorSet& s = out.minors;
    s.m1 = m(0, 0);
    s.m2 = m(1, 1);
    s.m3 = m(2, 2);
    s.m12 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    s.m13 = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    s.m23 = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    s.m123 = det(m);

    const auto v = s.signed_values();
    out.all_positive = std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
    const bool nonneg = std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; });
    const bool order1 = v[0] > 0 || v[1] > 0 || v[2] > 0;
    const bool order2 = v[3] > 0 || v[4] > 0 || v[5] > 0;
    out.p0_plus = nonneg && order1 && order2 && v[6] > 0;
    return out;
}

inline bool is_class_p(const Matrix3& m) { return signed_principal_minors(m).all_positive; }

inline bool is_class_p0_plus(const Matrix3& m) { return signed_principal_minors(m).p0_plus; }

inline double p1_eval(const Matrix3& m, double y) {
    const double t = m(0, 2) * y + m(2, 0);
    return t * t - 4.0 * m(0, 0) * m(2, 2) * y;
}

namespace detail {

struct P2Coefficients {
    double b1, b2, m12, m23;
};

inline P2Coefficients p2_coefficients(const Matrix3& m) {
    const MinorSet s = signed_principal_minors(m).minors;
    return {m(0, 1) * m(1, 2) - m(1, 1) * m(0, 2), m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0), s.m12, s.m23};
}

// {y : c2 y^2 + c1 y + c0 < 0} for c2 >= 0, which is always an interval.
inline Interval negative_set(double c2, double c1, double c0) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (c2 == 0.0) {
        if (c1 < 0.0) return Interval::open(-c0 / c1, inf);
        if (c1 > 0.0) return Interval::open(-inf, -c0 / c1);
        return c0 < 0.0 ? Interval::open(-inf, inf) : Interval::none();
    }
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc <= 0.0) return Interval::none();
    const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
    double r1 = q / c2;
    double r2 = q != 0.0 ? c0 / q : -r1;
    if (r1 > r2) std::swap(r1, r2);
    return Interval::open(r1, r2);
}

inline Interval positive_reals() { return Interval::open(0.0, std::numeric_limits<double>::infinity()); }

}  // namespace detail

inline double p2_eval(const Matrix3& m, double y) {
    const auto c = detail::p2_coefficients(m);
    const double t = c.b1 * y + c.b2;
    return t * t - 4.0 * c.m12 * c.m23 * y;
}

/// p2 in the expanded form b1^2 y^2 - 2 (M12 M23 + m22 det) y + b2^2.
inline double p2_eval_expanded(const Matrix3& m, double y) {
    const auto c = detail::p2_coefficients(m);
    return c.b1 * c.b1 * y * y - 2.0 * (c.m12 * c.m23 + m(1, 1) * det(m)) * y + c.b2 * c.b2;
}

/// Sylvester test for negative definiteness of a symmetric matrix.
///
/// The matrix is scaled by its largest entry first so the 1e-12 strictness
/// margin on the leading minors is independent of magnitude. Throws
/// NotSymmetric when |s_ij - s_ji| exceeds 1e-12 of that scale.
inline bool is_negative_definite(const Matrix3& sym) {
    constexpr double margin = 1e-12;
    const double scale = max_abs_entry(sym);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(sym(i, j) - sym(j, i)) > margin * std::max(scale, 1.0))
                throw NotSymmetric("matrix is not symmetric");
    if (scale == 0.0 || !std::isfinite(scale)) return false;
    const Matrix3 n = (1.0 / scale) * sym;
    const double d1 = n(0, 0);
    const double d2 = n(0, 0) * n(1, 1) - n(0, 1) * n(1, 0);
    const double d3 = det(n);
    return d1 < -margin && d2 > margin && d3 < -margin;
}

struct VolterraLyapunovCheck {
    bool stable = false;
    std::optional<double> witness_y;
    Interval feasible_y;  ///< {y > 0 : p1(y) < 0 and p2(y) < 0}
};

/// Exact order-3 test: class P plus a common y > 0 where p1 and p2 are negative.
/// The witness is the midpoint of the common interval and is re-verified.
inline VolterraLyapunovCheck volterra_lyapunov_check(const Matrix3& m) {
    VolterraLyapunovCheck out;
    if (!is_class_p(m)) return out;

    const double c2_1 = m(0, 2) * m(0, 2);
    const double c1_1 = 2.0 * m(0, 2) * m(2, 0) - 4.0 * m(0, 0) * m(2, 2);
    const double c0_1 = m(2, 0) * m(2, 0);
    const auto c = detail::p2_coefficients(m);
    const Interval omega1 = detail::negative_set(c2_1, c1_1, c0_1);
    const Interval omega2 = detail::negative_set(c.b1 * c.b1, 2.0 * c.b1 * c.b2 - 4.0 * c.m12 * c.m23, c.b2 * c.b2);

    out.feasible_y = omega1.intersect(omega2).intersect(detail::positive_reals());
    if (out.feasible_y.empty) return out;
    const double y = out.feasible_y.midpoint();
    if (p1_eval(m, y) < 0.0 && p2_eval(m, y) < 0.0) {
        out.stable = true;
        out.witness_y = y;
    }
    return out;
}

/// Positive diagonal scaling (d1, d2, d3); for build_q() matrices these are
/// (tau1, tau2, tau3).
using Diagonal3 = std::array<double, 3>;

inline bool verifies_certificate(const Matrix3& m, const Diagonal3& d) {
    if (!(d[0] > 0.0 && d[1] > 0.0 && d[2] > 0.0)) return false;
    return is_negative_definite(diagonal_lyapunov_sum(m, d));
}

inline constexpr std::uint64_t kDefaultCertificateBudget = 100000;

namespace detail {

// With d1 = 1 and d3 = y fixed, the largest eigenvalue of m D + D m^T is
// convex in d2, hence unimodal in log d2. Golden-section search over log d2.
inline std::optional<Diagonal3> certificate_along_ray(const Matrix3& m, double y) {
    if (!(y > 0.0) || !std::isfinite(y)) return std::nullopt;
    auto lam = [&](double t) {
        return symmetric_eigenvalues(diagonal_lyapunov_sum(m, {1.0, std::exp(t), y}))[2];
    };
    const double centre = 0.5 * std::log(y);
    double lo = centre - 40.0, hi = centre + 40.0;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = lam(x1), f2 = lam(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = lam(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = lam(x2);
        }
    }
    const Diagonal3 d = {1.0, std::exp(0.5 * (lo + hi)), y};
    if (verifies_certificate(m, d)) return d;
    return std::nullopt;
}

}  // namespace detail

/// Searches for a positive diagonal D with m D + D m^T negative definite.
///
/// When the order-3 test yields a feasible y the search first fixes
/// d3/d1 = y (witness, then the interval's geometric centre) and solves the
/// remaining one-dimensional problem. Otherwise, or if that fails, `budget`
/// log-uniform draws from [1e-4, 1e4]^3 are tried, seeded by `seed`.
/// An empty result does not prove that no D exists.
inline std::optional<Diagonal3> find_diagonal_d(const Matrix3& m, std::uint64_t seed,
                                                std::uint64_t budget = kDefaultCertificateBudget) {
    const auto vl = volterra_lyapunov_check(m);
    if (vl.witness_y) {
        if (auto d = detail::certificate_along_ray(m, *vl.witness_y)) return d;
        const Interval& f = vl.feasible_y;
        if (!f.empty && f.lo > 0.0 && std::isfinite(f.hi))
            if (auto d = detail::certificate_along_ray(m, std::sqrt(f.lo * f.hi))) return d;
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log10_scale(-4.0, 4.0);
    for (std::uint64_t k = 0; k < budget; ++k) {
        const Diagonal3 d = {std::pow(10.0, log10_scale(rng)), std::pow(10.0, log10_scale(rng)),
                             std::pow(10.0, log10_scale(rng))};
        if (verifies_certificate(m, d)) return d;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Model-specific quantities

/// Coupling coefficient of (I - I2*) in the R equation of the transformed
/// system; it is also q31. The GAS condition is automatic when it vanishes.
inline double recovered_infectious_coupling(const ModelParams& p) {
    return p.b_C / p.delta - p.b_C + p.b_I - p.v / p.delta;
}

/// Linearisation matrix of the transformed system about E2*, rows and
/// columns ordered (R, M, I), transposed so that dV/dt = X (Q D + D Q^T) X^T.
inline Matrix3 build_q(const ModelParams& p) {
    validate(p);
    Matrix3 q;
    q(0, 0) = -(p.b_C + p.epsilon + p.mu);
    q(0, 1) = p.delta * p.epsilon;
    q(0, 2) = 0.0;
    q(1, 0) = (p.v - p.b_C) / p.delta;
    q(1, 1) = -(p.v + p.mu);
    q(1, 2) = p.a;
    q(2, 0) = recovered_infectious_coupling(p);
    q(2, 1) = p.v - p.b_I;
    q(2, 2) = -p.a;
    return q;
}

/// Closed-form principal minors of build_q(p).
inline MinorSet q_minors_closed_form(const ModelParams& p) {
    MinorSet s;
    s.m1 = -(p.b_C + p.epsilon + p.mu);
    s.m2 = -(p.v + p.mu);
    s.m3 = -p.a;
    s.m12 = (p.b_C + p.mu) * (p.v + p.mu + p.epsilon);
    s.m13 = (p.b_C + p.epsilon + p.mu) * p.a;
    s.m23 = p.a * (p.b_I + p.mu);
    s.m123 = -p.a * ((p.b_I + p.mu) * (p.b_C + p.epsilon + p.mu) - p.delta * p.epsilon * (p.b_I - p.b_C));
    return s;
}

/// Root of p1 for build_q(p): p1 < 0 exactly on (threshold, inf).
inline double omega1_threshold(const ModelParams& p) {
    const double k = recovered_infectious_coupling(p);
    return k * k / (4.0 * (p.b_C + p.epsilon + p.mu) * p.a);
}

inline Interval omega1_interval(const ModelParams& p) {
    return Interval::open(omega1_threshold(p), std::numeric_limits<double>::infinity());
}

/// Open interval on which p2 < 0 for build_q(p).
inline Interval omega2_interval(const ModelParams& p) {
    const Matrix3 q = build_q(p);
    const auto c = detail::p2_coefficients(q);
    if (c.b1 == 0.0)
        return Interval::open(c.b2 * c.b2 / (4.0 * c.m12 * c.m23), std::numeric_limits<double>::infinity());
    const double x = c.m12 * c.m23 + q(1, 1) * det(q);
    const double root = 2.0 * std::sqrt(c.m12 * c.m23 * q(1, 1) * det(q));
    const double hi = (x + root) / (c.b1 * c.b1);
    // Product of the roots is b2^2 / b1^2; avoids cancellation in x - root.
    const double lo = c.b2 * c.b2 / (x + root);
    return Interval::open(lo, hi);
}

struct GasCondition {
    bool holds = false;
    double lhs = 0.0;
    double rhs = 0.0;
    bool interval_form_holds = false;  ///< omega1_threshold < omega2_interval().hi
};

/// Explicit sufficient condition for Volterra-Lyapunov stability of
/// build_q(p), hence for global asymptotic stability of E* when R0 > 1:
///
///   (a eps (b_C - delta b_C + delta b_I - v))^2 / (4 a (b_C + eps + mu))
///     < M12 M23 + q22 det Q + 2 sqrt(M12 M23 q22 det Q)
///
/// with M12 = (b_C + mu)(v + mu + eps), M23 = a (b_I + mu).
/// Both sides are b1^2 times the interval endpoints; the interval form is
/// evaluated too and a disagreement not explained by a near-tie throws
/// ConsistencyError.
inline GasCondition gas_condition(const ModelParams& p) {
    validate(p);
    const MinorSet s = q_minors_closed_form(p);
    const double num = p.a * p.epsilon * (p.b_C - p.delta * p.b_C + p.delta * p.b_I - p.v);
    const double q22_det = -(p.v + p.mu) * s.m123;

    GasCondition g;
    g.lhs = num * num / (4.0 * p.a * (p.b_C + p.epsilon + p.mu));
    g.rhs = s.m12 * s.m23 + q22_det + 2.0 * std::sqrt(s.m12 * s.m23 * q22_det);
    g.holds = g.lhs < g.rhs;
    g.interval_form_holds = omega1_threshold(p) < omega2_interval(p).hi;

    if (g.holds != g.interval_form_holds && std::abs(g.lhs - g.rhs) > 1e-9 * std::abs(g.rhs))
        throw ConsistencyError("closed-form and interval GAS conditions disagree");
    return g;
}

/// -mu - b_C + eps + a N* delta < 0.
inline bool legacy_condition_2b(const ModelParams& p) {
    validate(p);
    return -p.mu - p.b_C + p.epsilon + p.a * p.n_star() * p.delta < 0.0;
}

/// b_I + a N* - v - a c - b_C - mu - delta a c < 0, for a caller-supplied c.
inline bool legacy_condition_2a(const ModelParams& p, double c) {
    validate(p);
    return p.b_I + p.a * p.n_star() - p.v - p.a * c - p.b_C - p.mu - p.delta * p.a * c < 0.0;
}

// ---------------------------------------------------------------------------
// Lyapunov function

struct LyapunovWeights {
    double tau1 = 1.0;  ///< weight of (R - R2*)^2
    double tau2 = 1.0;  ///< weight of (M - M2*)^2
    double tau3 = 1.0;  ///< weight of the logarithmic I term

    LyapunovWeights() = default;
    LyapunovWeights(double t1, double t2, double t3) : tau1(t1), tau2(t2), tau3(t3) {
        if (!(t1 > 0.0 && t2 > 0.0 && t3 > 0.0) || !std::isfinite(t1 + t2 + t3))
            throw DomainError("Lyapunov weights must be finite and strictly positive");
    }

    /// Matches the (R, M, I) ordering of build_q().
    static LyapunovWeights from_certificate(const Diagonal3& d) { return {d[0], d[1], d[2]}; }

    Diagonal3 diagonal() const { return {tau1, tau2, tau3}; }
};

namespace detail {

// x - log(1 + x) >= 0, accurate near x = 0.
inline double log_excess(double x) {
    if (std::abs(x) < 1e-3) {
        double term = x * x, sum = 0.0;
        for (int n = 2; n < 12; ++n) {
            sum += (n % 2 == 0 ? 1.0 : -1.0) * term / n;
            term *= x;
        }
        return sum;
    }
    return x - std::log1p(x);
}

inline void require_positive_infectious(const StateMIR& s) {
    if (!(s.I > 0.0)) throw DomainError("Lyapunov function requires I > 0");
}

}  // namespace detail

/// V(M, I, R) about the transformed endemic equilibrium.
inline double lyapunov_v(const ModelParams& p, const LyapunovWeights& w, const StateMIR& s) {
    detail::require_positive_infectious(s);
    const StateMIR e = transformed_dee(p);
    const double dr = s.R - e.R, dm = s.M - e.M;
    return w.tau1 * dr * dr + w.tau2 * dm * dm + 2.0 * w.tau3 * e.I * detail::log_excess((s.I - e.I) / e.I);
}

/// dV/dt by the chain rule along vf_mir.
inline double lyapunov_dv(const ModelParams& p, const LyapunovWeights& w, const StateMIR& s) {
    detail::require_positive_infectious(s);
    const StateMIR e = transformed_dee(p);
    const StateMIR f = vf_mir(p, s);
    return 2.0 * w.tau1 * (s.R - e.R) * f.R + 2.0 * w.tau2 * (s.M - e.M) * f.M +
           2.0 * w.tau3 * (s.I - e.I) / s.I * f.I;
}

/// dV/dt as the quadratic form X (Q D + D Q^T) X^T.
inline double lyapunov_dv_quadratic(const ModelParams& p, const LyapunovWeights& w, const StateMIR& s) {
    detail::require_positive_infectious(s);
    const StateMIR e = transformed_dee(p);
    const std::array<double, 3> x = {s.R - e.R, s.M - e.M, s.I - e.I};
    return quadratic_form(diagonal_lyapunov_sum(build_q(p), w.diagonal()), x);
}

// ---------------------------------------------------------------------------
// Combined report

enum class Verdict { GasCertified, DfeGas, Inconclusive, InconclusiveConditionFails };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::GasCertified: return "GAS-certified";
        case Verdict::DfeGas: return "DFE-GAS";
        case Verdict::Inconclusive: return "inconclusive";
        case Verdict::InconclusiveConditionFails: return "inconclusive (condition sufficient only)";
    }
    return "inconclusive";
}

struct StabilityReport {
    double r0 = 0.0;
    Matrix3 q;
    MinorSet minors;
    bool in_class_p = false;
    Interval omega1;
    Interval omega2;
    bool gas_holds = false;
    double gas_lhs = 0.0;
    double gas_rhs = 0.0;
    std::optional<double> witness_y;
    std::optional<Diagonal3> certificate_d;
    std::optional<double> certificate_max_eigenvalue;
    bool legacy_2b_holds = false;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::string> warnings;
};

inline StabilityReport stability_report(const ModelParams& p, std::uint64_t seed = 0,
                                        std::uint64_t budget = kDefaultCertificateBudget) {
    StabilityReport r;
    r.r0 = reproduction_number(p);
    r.q = build_q(p);
    const SignedMinors sm = signed_principal_minors(r.q);
    r.minors = sm.minors;
    r.in_class_p = sm.all_positive;
    r.omega1 = omega1_interval(p);
    r.omega2 = omega2_interval(p);
    const GasCondition g = gas_condition(p);
    r.gas_holds = g.holds;
    r.gas_lhs = g.lhs;
    r.gas_rhs = g.rhs;
    r.witness_y = volterra_lyapunov_check(r.q).witness_y;
    r.legacy_2b_holds = legacy_condition_2b(p);

    if (r.gas_holds) {
        r.certificate_d = find_diagonal_d(r.q, seed, budget);
        if (r.certificate_d)
            r.certificate_max_eigenvalue = symmetric_eigenvalues(diagonal_lyapunov_sum(r.q, *r.certificate_d))[2];
        else
            r.warnings.push_back("certificate search exhausted its budget without a verified D");
    }

    if (!(r.r0 > 1.0))
        r.verdict = Verdict::DfeGas;
    else if (!r.gas_holds)
        r.verdict = Verdict::InconclusiveConditionFails;
    else if (r.certificate_d)
        r.verdict = Verdict::GasCertified;
    else
        r.verdict = Verdict::Inconclusive;
    return r;
}

}  // namespace scirs
