#pragma once

// Implementation of the `scirs` subcommands. Each command reads an Options
// value, writes to the given streams or files and returns the process exit
// code: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "io.hpp"
#include "scirs.hpp"

namespace scirs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct Options {
    std::string params_path;
    std::string out;                   ///< file (or directory for simulate); empty = stdout
    std::string format = "csv";        ///< csv | json
    std::string system = "full";       ///< full | limit | sir | mir
    double h = 1e-3;
    double t_end = 2000.0;
    std::uint64_t seed = 1;
    std::size_t n_init = 5;
    double tol = 1e-3;
    std::size_t record_stride = 0;     ///< 0 = one sample per unit time
    std::vector<std::string> inits;    ///< explicit initial states, comma separated
    std::uint64_t budget = kDefaultCertificateBudget;
    std::optional<double> legacy_c;    ///< c for the geometric legacy condition
    std::string axis;
    std::vector<double> values;
    bool sweep_simulate = false;
};

namespace detail {

template <ModelState State>
struct SystemOps;

template <>
struct SystemOps<StateSCIRN> {
    static constexpr const char* name = "full";
    static StateSCIRN field(const ModelParams& p, const StateSCIRN& s) { return vf_full(p, s); }
    static StateSCIRN from_sci(const ModelParams& p, const StateSCI& s) { return lift_to_full(p, s); }
};

template <>
struct SystemOps<StateSCI> {
    static constexpr const char* name = "limit";
    static StateSCI field(const ModelParams& p, const StateSCI& s) { return vf_limit(p, s); }
    static StateSCI from_sci(const ModelParams&, const StateSCI& s) { return s; }
};

template <>
struct SystemOps<StateSIR> {
    static constexpr const char* name = "sir";
    static StateSIR field(const ModelParams& p, const StateSIR& s) { return vf_sir(p, s); }
    static StateSIR from_sci(const ModelParams& p, const StateSCI& s) { return to_sir(p, s); }
};

template <>
struct SystemOps<StateMIR> {
    static constexpr const char* name = "mir";
    static StateMIR field(const ModelParams& p, const StateMIR& s) { return vf_mir(p, s); }
    static StateMIR from_sci(const ModelParams& p, const StateSCI& s) { return to_mir(p, to_sir(p, s)); }
};

/// Equilibrium the flow is expected to approach: E* when R0 > 1, else E0.
template <ModelState State>
State attracting_equilibrium(const ModelParams& p) {
    const StateSCI e = reproduction_number(p) > 1.0 ? dee(p) : dfe(p);
    return SystemOps<State>::from_sci(p, e);
}

template <ModelState State>
State parse_state(const std::string& text) {
    using T = StateTraits<State>;
    std::array<double, T::dim> x{};
    std::size_t count = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto token = std::string_view(text).substr(start, comma == std::string::npos ? std::string::npos
                                                                                          : comma - start);
        const auto v = parse_double(token);
        if (!v) throw ConfigError("init", "initial state '" + text + "' contains a non-number");
        if (count < T::dim) x[count] = *v;
        ++count;
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (count != T::dim)
        throw ConfigError("init", "initial state '" + text + "' needs " + std::to_string(T::dim) + " components");
    return T::from_array(x);
}

template <ModelState State>
std::vector<State> initial_states(const ModelParams& p, const Options& o) {
    std::vector<State> out;
    if (!o.inits.empty()) {
        for (const auto& s : o.inits) out.push_back(parse_state<State>(s));
        return out;
    }
    if (o.n_init < 1) throw ConfigError("n-init", "--n-init must be at least 1");
    for (const StateSCI& s : sample_omega(p, o.n_init, o.seed)) out.push_back(SystemOps<State>::from_sci(p, s));
    return out;
}

template <ModelState State>
IntegrationConfig<State> integration_config(const ModelParams& p, const Options& o) {
    IntegrationConfig<State> cfg;
    cfg.h = o.h;
    cfg.t_end = o.t_end;
    cfg.record_stride = o.record_stride ? o.record_stride : IntegrationConfig<State>::unit_time_stride(o.h);
    cfg.convergence_tol = o.tol;
    cfg.convergence_target = attracting_equilibrium<State>(p);
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(o.h > 0.0 ? "t-end" : "h", e.what());
    }
    if (!(o.tol > 0.0)) throw ConfigError("tol", "--tol must be positive");
    return cfg;
}

struct RunFailure {
    std::size_t run;
    double time;
};

/// Integrates every start concurrently; throws RunFailure for the first run
/// (in input order) that hits a non-finite state.
template <ModelState State>
std::vector<Trajectory<State>> run_all(const ModelParams& p, const std::vector<State>& starts,
                                       const IntegrationConfig<State>& cfg) {
    auto field = [&p](const State& s) { return SystemOps<State>::field(p, s); };
    std::vector<std::future<Trajectory<State>>> jobs;
    for (const State& s0 : starts)
        jobs.push_back(std::async(std::launch::async, [&, s0] { return integrate(field, s0, cfg); }));
    std::vector<Trajectory<State>> out;
    std::optional<RunFailure> failure;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        try {
            out.push_back(jobs[k].get());
        } catch (const NonFiniteState& e) {
            if (!failure) failure = RunFailure{k, e.time()};
        }
    }
    if (failure) throw *failure;
    return out;
}

inline std::string run_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%03zu", k);
    return buf;
}

/// Writes to o.out when set, else to `fallback`.
template <class Writer>
void emit(const Options& o, std::ostream& fallback, Writer&& write) {
    if (o.out.empty()) {
        write(fallback);
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw ConfigError("out", "cannot write '" + o.out + "'");
    write(f);
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error";
        if (!e.field().empty()) err << " [" << e.field() << "]";
        err << ": " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParameterError& e) {
        err << "error [" << e.field() << "]: " << e.what() << '\n';
        return kExitConfig;
    } catch (const RunFailure& f) {
        err << "error: " << run_name(f.run) << ": non-finite state at t = " << format_double(f.time) << '\n';
        return kExitNumerical;
    } catch (const NonFiniteState& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

template <class Fn>
auto with_system(const std::string& system, Fn&& fn) {
    if (system == "full") return fn(StateSCIRN{});
    if (system == "limit") return fn(StateSCI{});
    if (system == "sir") return fn(StateSIR{});
    if (system == "mir") return fn(StateMIR{});
    throw ConfigError("system", "unknown system '" + system + "' (expected full, limit, sir or mir)");
}

inline void require_format(const Options& o) {
    if (o.format != "csv" && o.format != "json")
        throw ConfigError("format", "unknown format '" + o.format + "' (expected csv or json)");
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline int cmd_r0(const Options& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const ModelParams p = load_params(o.params_path);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", reproduction_number(p));
        out << buf << '\n';
        return kExitOk;
    });
}

inline int cmd_equilibria(const Options& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const ModelParams p = load_params(o.params_path);
        const json j = equilibrium_json(equilibrium_report(p));
        detail::emit(o, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
        return kExitOk;
    });
}

inline int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const ModelParams p = load_params(o.params_path);
        json j = stability_json(stability_report(p, o.seed, o.budget));
        if (o.legacy_c) j["legacy_2a_holds"] = legacy_condition_2a(p, *o.legacy_c);
        detail::emit(o, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
        return kExitOk;
    });
}

/// One trajectory file per initial state in directory o.out, plus summary.json
/// (also printed to `out`).
inline int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const ModelParams p = load_params(o.params_path);
        detail::require_format(o);
        return detail::with_system(o.system, [&]<class State>(State) {
            const auto starts = detail::initial_states<State>(p, o);
            const auto cfg = detail::integration_config<State>(p, o);
            const auto runs = detail::run_all(p, starts, cfg);

            const std::filesystem::path dir = o.out.empty() ? std::filesystem::path("simulate_out") : std::filesystem::path(o.out);
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            if (ec) throw ConfigError("out", "cannot create directory '" + dir.string() + "'");

            json summary;
            summary["system"] = detail::SystemOps<State>::name;
            summary["h"] = cfg.h;
            summary["t_end"] = cfg.t_end;
            summary["tol"] = cfg.convergence_tol;
            summary["target"] = state_json(*cfg.convergence_target);
            summary["runs"] = json::array();
            for (std::size_t k = 0; k < runs.size(); ++k) {
                const auto& tr = runs[k];
                const std::string file = detail::run_name(k) + (o.format == "csv" ? ".csv" : ".json");
                std::ofstream f(dir / file, std::ios::binary);
                if (!f) throw ConfigError("out", "cannot write '" + (dir / file).string() + "'");
                if (o.format == "csv") {
                    write_trajectory_csv(f, tr);
                } else {
                    json jt;
                    jt["t"] = tr.times;
                    for (std::size_t c = 0; c < StateTraits<State>::dim; ++c) {
                        std::vector<double> col;
                        col.reserve(tr.states.size());
                        for (const auto& s : tr.states) col.push_back(StateTraits<State>::to_array(s)[c]);
                        jt[std::string(StateTraits<State>::names[c])] = col;
                    }
                    f << jt.dump() << '\n';
                }
                summary["runs"].push_back({{"run", k},
                                           {"file", file},
                                           {"initial", state_json(starts[k])},
                                           {"final", state_json(tr.final_state)},
                                           {"converged_at", optional_json(tr.converged_at)}});
            }
            std::ofstream(dir / "summary.json", std::ios::binary) << summary.dump(2) << '\n';
            out << summary.dump(2) << '\n';
            return kExitOk;
        });
    });
}

/// Single CSV `run_id,t,<components>` for all runs, followed by the
/// equilibrium as run_id `equilibrium` with an empty t.
inline int cmd_phase(const Options& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const ModelParams p = load_params(o.params_path);
        const std::size_t curves = o.inits.empty() ? o.n_init : o.inits.size();
        if (curves < 2) throw ConfigError("n-init", "a phase portrait needs at least 2 initial states");
        return detail::with_system(o.system, [&]<class State>(State) {
            const auto starts = detail::initial_states<State>(p, o);
            const auto cfg = detail::integration_config<State>(p, o);
            const auto runs = detail::run_all(p, starts, cfg);
            detail::emit(o, out, [&](std::ostream& os) {
                os << csv_header<State>("run_id,t") << '\n';
                for (std::size_t k = 0; k < runs.size(); ++k)
                    for (std::size_t i = 0; i < runs[k].times.size(); ++i) {
                        os << k << ',' << format_double(runs[k].times[i]);
                        write_state_fields(os, runs[k].states[i]);
                        os << '\n';
                    }
                os << "equilibrium,";
                write_state_fields(os, *cfg.convergence_target);
                os << '\n';
            });
            return kExitOk;
        });
    });
}

/// One CSV row per axis value: value,r0,gas_holds,legacy_2b,converged_at,verdict.
/// converged_at is filled only with --simulate: the latest convergence time over
/// the sampled full-system runs, empty if any run fails to converge.
inline int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const ModelParams base = load_params(o.params_path);
        const int idx = param_index(o.axis);
        if (idx < 0) throw ConfigError("axis", "unknown sweep axis '" + o.axis + "'");
        if (o.values.empty()) throw ConfigError("values", "--values is empty");

        std::vector<ModelParams> points;
        for (double v : o.values) {
            ModelParams p = base;
            p.*kParamMembers[idx] = v;
            try {
                validate(p);
            } catch (const ParameterError& e) {
                throw ConfigError(e.field(), "sweep value " + format_double(v) + ": " + e.what());
            }
            points.push_back(p);
        }

        std::ostringstream table;
        table << "value,r0,gas_holds,legacy_2b,converged_at,verdict\n";
        for (std::size_t k = 0; k < points.size(); ++k) {
            const ModelParams& p = points[k];
            const StabilityReport rep = stability_report(p, o.seed, o.budget);
            std::string converged;
            if (o.sweep_simulate) {
                const auto cfg = detail::integration_config<StateSCIRN>(p, o);
                std::vector<StateSCIRN> starts;
                for (const auto& s : sample_omega(p, std::max<std::size_t>(o.n_init, 1), o.seed))
                    starts.push_back(lift_to_full(p, s));
                std::optional<double> latest = 0.0;
                for (const auto& tr : detail::run_all(p, starts, cfg)) {
                    if (!tr.converged_at) {
                        latest.reset();
                        break;
                    }
                    latest = std::max(*latest, *tr.converged_at);
                }
                if (latest) converged = format_double(*latest);
            }
            table << format_double(o.values[k]) << ',' << format_double(rep.r0) << ','
                  << (rep.gas_holds ? "true" : "false") << ',' << (rep.legacy_2b_holds ? "true" : "false") << ','
                  << converged << ',' << to_string(rep.verdict) << '\n';
        }
        detail::emit(o, out, [&](std::ostream& os) { os << table.str(); });
        return kExitOk;
    });
}

}  // namespace scirs::cli
