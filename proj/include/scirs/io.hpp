#pragma once

// Params files, trajectory CSV and JSON report serialization.
//
// Params file: one `name = value` per line, `#` starts a comment, keys are
// A, epsilon, a, v, mu, delta, b_I, b_C. A JSON object with the same keys is
// accepted as well (detected by a leading `{`).

#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "errors.hpp"
#include "integrator.hpp"
#include "model.hpp"
#include "params.hpp"
#include "stability.hpp"
#include "state.hpp"

namespace scirs {

using json = nlohmann::json;

/// Shortest decimal string that parses back to exactly `x`.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// Strict full-string parse; std::nullopt on junk or overflow.
inline std::optional<double> parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return x;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline ModelParams finish_params(const ModelParams& p, const std::array<bool, 8>& seen) {
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) {
            const std::string name(kParamNames[i]);
            throw ConfigError(name, "missing parameter '" + name + "'");
        }
    try {
        validate(p);
    } catch (const ParameterError& e) {
        throw ConfigError(e.field(), std::string("invalid parameter: ") + e.what());
    }
    return p;
}

inline ModelParams parse_params_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON params: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("", "JSON params must be an object");
    ModelParams p;
    std::array<bool, 8> seen{};
    for (const auto& [key, val] : j.items()) {
        const int idx = param_index(key);
        if (idx < 0) throw ConfigError(key, "unknown parameter '" + key + "'");
        if (!val.is_number()) throw ConfigError(key, "parameter '" + key + "' must be a number");
        p.*kParamMembers[idx] = val.get<double>();
        seen[idx] = true;
    }
    return finish_params(p, seen);
}

}  // namespace detail

/// Parses a params file body. Errors are ConfigError naming the offending key.
inline ModelParams parse_params(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return detail::parse_params_json(text);

    ModelParams p;
    std::array<bool, 8> seen{};
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'name = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const int idx = param_index(key);
        if (idx < 0) throw ConfigError(key, "unknown parameter '" + key + "' on line " + std::to_string(line_no));
        if (seen[idx]) throw ConfigError(key, "duplicate parameter '" + key + "'");
        const auto value = parse_double(line.substr(eq + 1));
        if (!value) throw ConfigError(key, "parameter '" + key + "' is not a number");
        p.*kParamMembers[idx] = *value;
        seen[idx] = true;
    }
    return detail::finish_params(p, seen);
}

inline ModelParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("params", "cannot open params file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_params(buf.str());
}

inline std::string params_to_text(const ModelParams& p) {
    std::string out;
    for (std::size_t i = 0; i < kParamNames.size(); ++i)
        out += std::string(kParamNames[i]) + " = " + format_double(p.*kParamMembers[i]) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// CSV

template <ModelState State>
std::string csv_header(std::string_view leading) {
    std::string h(leading);
    for (auto n : StateTraits<State>::names) {
        h += ',';
        h += n;
    }
    return h;
}

template <ModelState State>
void write_state_fields(std::ostream& os, const State& s) {
    for (double x : StateTraits<State>::to_array(s)) os << ',' << format_double(x);
}

/// `t,<components>` then one row per recorded sample. LF line endings.
template <ModelState State>
void write_trajectory_csv(std::ostream& os, const Trajectory<State>& traj) {
    os << csv_header<State>("t") << '\n';
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        os << format_double(traj.times[k]);
        write_state_fields(os, traj.states[k]);
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// JSON

template <ModelState State>
json state_json(const State& s) {
    json j = json::object();
    const auto x = StateTraits<State>::to_array(s);
    for (std::size_t i = 0; i < x.size(); ++i) j[std::string(StateTraits<State>::names[i])] = x[i];
    return j;
}

template <class T>
json optional_json(const std::optional<T>& v) {
    if (!v) return nullptr;
    if constexpr (ModelState<T>)
        return state_json(*v);
    else
        return json(*v);
}

inline json params_json(const ModelParams& p) {
    json j = json::object();
    for (std::size_t i = 0; i < kParamNames.size(); ++i) j[std::string(kParamNames[i])] = p.*kParamMembers[i];
    return j;
}

/// `hi` is null when the interval is unbounded above.
inline json interval_json(const Interval& iv) {
    json j = {{"empty", iv.empty}, {"lo", iv.lo}};
    j["hi"] = std::isinf(iv.hi) ? json(nullptr) : json(iv.hi);
    return j;
}

inline json minors_json(const MinorSet& m) {
    return {{"M1", m.m1}, {"M2", m.m2}, {"M3", m.m3}, {"M12", m.m12},
            {"M13", m.m13}, {"M23", m.m23}, {"M123", m.m123}};
}

inline json matrix_json(const Matrix3& m) {
    json rows = json::array();
    for (const auto& r : m.a) rows.push_back(json::array({r[0], r[1], r[2]}));
    return rows;
}

inline json equilibrium_json(const EquilibriumReport& r) {
    json j;
    j["r0"] = r.r0;
    j["dfe"] = state_json(r.dfe);
    j["dee"] = optional_json(r.dee);
    j["dee_sir"] = optional_json(r.dee_sir);
    j["dee_mir"] = optional_json(r.dee_mir);
    j["residual_norm"] = {{"dfe", r.residual_norm.dfe},
                          {"dee", optional_json(r.residual_norm.dee)},
                          {"dee_sir", optional_json(r.residual_norm.dee_sir)},
                          {"dee_mir", optional_json(r.residual_norm.dee_mir)}};
    return j;
}

inline json stability_json(const StabilityReport& r) {
    json j;
    j["r0"] = r.r0;
    j["q"] = matrix_json(r.q);
    j["minors"] = minors_json(r.minors);
    j["in_class_p"] = r.in_class_p;
    j["omega1"] = interval_json(r.omega1);
    j["omega2"] = interval_json(r.omega2);
    j["gas_holds"] = r.gas_holds;
    j["gas_lhs"] = r.gas_lhs;
    j["gas_rhs"] = r.gas_rhs;
    j["witness_y"] = optional_json(r.witness_y);
    j["certificate_d"] = optional_json(r.certificate_d);
    j["certificate_max_eigenvalue"] = optional_json(r.certificate_max_eigenvalue);
    j["legacy_2b_holds"] = r.legacy_2b_holds;
    j["verdict"] = to_string(r.verdict);
    j["warnings"] = r.warnings;
    return j;
}

}  // namespace scirs
