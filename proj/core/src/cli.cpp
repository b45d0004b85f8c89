#include "kambeam/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "kambeam/divisors.hpp"
#include "kambeam/frequency.hpp"
#include "kambeam/homological.hpp"
#include "kambeam/normalform.hpp"
#include "kambeam/report.hpp"
#include "kambeam/simulator.hpp"
#include "kambeam/sitegen.hpp"

namespace kambeam {

namespace {

namespace fs = std::filesystem;

struct Outcome {
    json result;
    int code = 0;
    std::string csv;                    // primary CSV body (schedule)
    std::string trajectory_csv;         // simulate only
    std::optional<std::string> trajectory_path;
};

using Command = std::function<Outcome(const ConfigSection&)>;

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<BigSite> big_sites(const ConfigSection& sec) {
    const auto file = sec.find("sites_file");
    if (file && sec.has("sites")) throw ConfigError(sec.name() + ".sites_file", "give either sites or sites_file");
    if (file) return load_sites_file(*file);
    if (!sec.has("sites")) throw ConfigError(sec.name() + ".sites", "missing required key");
    return sec.get_sites("sites", {});
}

std::vector<Site> native_sites(const ConfigSection& sec) {
    const auto big = big_sites(sec);
    return to_native(std::span<const BigSite>(big));
}

std::vector<double> xi_of(const ConfigSection& sec, std::size_t b) {
    auto xi = sec.get_doubles("xi", std::vector<double>(b, 1e-3));
    if (xi.size() != b) throw ConfigError(sec.name() + ".xi", "expected " + std::to_string(b) + " values");
    return xi;
}

json sites_json(std::span<const Site> S) {
    json out = json::array();
    for (const auto& s : S) out.push_back(to_json(s));
    return out;
}

json sites_json(std::span<const BigSite> S) {
    json out = json::array();
    for (const auto& s : S) out.push_back(to_json(s));
    return out;
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

Outcome cmd_sitegen(const ConfigSection& sec) {
    sec.require_known({"b", "x1"});
    GenConfig cfg;
    cfg.b = static_cast<int>(sec.get_int("b", 2));
    if (auto x1 = sec.find("x1")) {
        mpz_class v;
        if (v.set_str(*x1, 10) != 0) throw ConfigError(sec.name() + ".x1", "expected an integer");
        cfg.x1 = v;
    }
    const auto sites = generate_sites(cfg);
    Outcome out;
    out.result = {{"command", "sitegen"},
                  {"b", cfg.b},
                  {"x1", (cfg.x1 ? *cfg.x1 : default_seed(cfg.b)).get_str()},
                  {"parity", parity_audit(sites)},
                  {"sites", sites_json(sites)}};
    return out;
}

Outcome cmd_verify(const ConfigSection& sec) {
    sec.require_known({"sites", "sites_file", "window"});
    const auto S = big_sites(sec);
    const auto window = sec.get_int("window", 50);
    const auto rep = verify_admissible<mpz_class>(S, window);
    Outcome out;
    out.result = to_json(rep);
    out.result["command"] = "verify";
    out.result["sites"] = sites_json(S);
    out.code = rep.pass ? 0 : 2;
    return out;
}

Outcome cmd_classify(const ConfigSection& sec) {
    sec.require_known({"sites", "sites_file", "window"});
    const auto S = big_sites(sec);
    const auto window = sec.get_int("window", 30);
    const auto tables = classify_resonances<mpz_class>(S, window);
    json t1 = json::array();
    json t2 = json::array();
    for (const auto& e : tables.type1) t1.push_back(to_json(e));
    for (const auto& e : tables.type2) t2.push_back(to_json(e));
    Outcome out;
    out.result = {{"command", "classify"}, {"window", window}, {"sites", sites_json(S)}, {"type1", t1}, {"type2", t2}};
    return out;
}

Outcome cmd_normalform(const ConfigSection& sec) {
    sec.require_known({"sites", "sites_file", "xi", "eps", "window"});
    const auto S = native_sites(sec);
    const auto xi = xi_of(sec, S.size());
    const double eps = sec.get_double("eps", 1.0);
    const auto window = sec.get_int("window", 10);
    NormalForm nf(classify_resonances<std::int64_t>(S, window), xi, eps);

    json normal = json::array();
    for (const Site& n : window_sites(window)) {
        if (nf.tables().contains(n)) continue;
        json row = {{"site", to_json(n)}, {"lambda", lambda(n)}, {"Omega", nf.Omega(n)}, {"Omega_shift", nf.Omega_shift(n)}};
        if (const ResonanceEntry* e = nf.entry_for(n)) {
            row["partner"] = to_json(e->n == n ? e->m : e->n);
            row["kind"] = to_string(e->kind);
        } else {
            row["partner"] = nullptr;
            row["kind"] = nullptr;
        }
        normal.push_back(row);
    }
    json couplings = json::array();
    for (const auto* table : {&nf.tables().type1, &nf.tables().type2}) {
        for (const auto& e : *table) {
            json row = to_json(e);
            row["a"] = cplx_json(nf.coupling(e));
            couplings.push_back(row);
        }
    }
    double xi_norm = 0.0;
    for (double x : xi) xi_norm += std::abs(x);
    const auto terms = perturbation_order(xi_norm, eps);
    json bounds = json::array();
    for (const auto& t : terms) bounds.push_back({{"name", t.name}, {"value", t.value}});

    Outcome out;
    out.result = {{"command", "normalform"},
                  {"sites", sites_json(S)},
                  {"xi", xi},
                  {"eps", eps},
                  {"window", window},
                  {"omega", nf.omega()},
                  {"omega_shift", nf.omega_shift()},
                  {"normal", normal},
                  {"couplings", couplings},
                  {"perturbation_order", bounds},
                  {"dominant_term", dominant_term(terms).name}};
    return out;
}

// The Melnikov families at one parameter point: a degenerate box holding xi.
Outcome cmd_melnikov(const ConfigSection& sec) {
    sec.require_known({"sites", "sites_file", "xi", "eps", "gamma", "tau", "K", "window"});
    MeasureConfig cfg;
    cfg.S = native_sites(sec);
    const auto xi = xi_of(sec, cfg.S.size());
    cfg.box = Box{xi, xi};
    cfg.eps = sec.get_double("eps", cfg.eps);
    cfg.gamma = sec.get_double("gamma", cfg.gamma);
    cfg.tau = sec.get_double("tau", cfg.tau);
    cfg.K = static_cast<int>(sec.get_int("K", cfg.K));
    cfg.window = sec.get_int("window", cfg.window);
    cfg.samples = 1;
    const auto rep = estimate_excluded_measure(cfg);
    Outcome out;
    out.result = {{"command", "melnikov"},
                  {"sites", sites_json(cfg.S)},
                  {"xi", xi},
                  {"eps", cfg.eps},
                  {"gamma", cfg.gamma},
                  {"tau", cfg.tau},
                  {"K", cfg.K},
                  {"window", cfg.window},
                  {"pass", rep.excluded == 0},
                  {"failed_families",
                   {{"R_k", rep.per_family.R_k > 0}, {"R_kn", rep.per_family.R_kn > 0}, {"R_knm", rep.per_family.R_knm > 0}}},
                  {"k0_block_flags", rep.k0_block_flags}};
    out.code = rep.excluded == 0 ? 0 : 2;
    return out;
}

Outcome cmd_measure(const ConfigSection& sec) {
    sec.require_known({"sites", "sites_file", "box_lo", "box_hi", "eps", "gamma", "tau", "K", "window", "samples", "seed"});
    MeasureConfig cfg;
    cfg.S = native_sites(sec);
    const std::size_t b = cfg.S.size();
    cfg.box.lo = sec.get_doubles("box_lo", std::vector<double>(b, 1.0));
    cfg.box.hi = sec.get_doubles("box_hi", std::vector<double>(b, 2.0));
    if (cfg.box.lo.size() != b) throw ConfigError(sec.name() + ".box_lo", "expected " + std::to_string(b) + " values");
    if (cfg.box.hi.size() != b) throw ConfigError(sec.name() + ".box_hi", "expected " + std::to_string(b) + " values");
    cfg.eps = sec.get_double("eps", cfg.eps);
    cfg.gamma = sec.get_double("gamma", cfg.gamma);
    cfg.tau = sec.get_double("tau", cfg.tau);
    cfg.K = static_cast<int>(sec.get_int("K", cfg.K));
    cfg.window = sec.get_int("window", cfg.window);
    const auto samples = sec.get_int("samples", static_cast<long long>(cfg.samples));
    if (samples < 1) throw ConfigError(sec.name() + ".samples", "must be >= 1");
    cfg.samples = static_cast<std::size_t>(samples);
    cfg.seed = static_cast<std::uint64_t>(sec.get_int("seed", static_cast<long long>(cfg.seed)));
    Outcome out;
    out.result = to_json(estimate_excluded_measure(cfg));
    out.result["command"] = "measure";
    out.result["sites"] = sites_json(cfg.S);
    return out;
}

Outcome cmd_schedule(const ConfigSection& sec) {
    sec.require_known({"r", "s", "eps0", "gamma", "tau", "c", "nu_max"});
    const auto sched = make_schedule(sec.get_double("r", 1.0), sec.get_double("s", 1.0), sec.get_double("eps0", 1e-8),
                                     sec.get_double("gamma", 1.0), sec.get_double("tau", 3.0), sec.get_double("c", 1.0),
                                     static_cast<int>(sec.get_int("nu_max", 6)));
    Outcome out;
    out.result = to_json(sched);
    out.result["command"] = "schedule";
    out.csv = sched.to_csv();
    return out;
}

Outcome cmd_kamstep(const ConfigSection& sec) {
    sec.require_known({"sites", "sites_file", "xi", "eps", "window", "modes", "modes_radius", "gamma", "tau", "K",
                       "r_plus", "lie_tol", "lie_max_terms", "a", "abar", "rho", "r", "s", "scale", "pert_K",
                       "cubic_k_max", "include_cubic", "include_action_square", "seed"});
    const auto S = native_sites(sec);
    const auto xi = xi_of(sec, S.size());
    NormalForm nf(classify_resonances<std::int64_t>(S, sec.get_int("window", 10)), xi, sec.get_double("eps", 1.0));

    std::vector<Site> modes;
    if (sec.has("modes")) {
        const auto big = sec.get_sites("modes", {});
        modes = to_native(std::span<const BigSite>(big));
    } else {
        const double radius = sec.get_double("modes_radius", 3.0);
        for (const Site& n : mode_window(radius)) {
            if (!nf.tables().contains(n)) modes.push_back(n);
        }
    }
    const NormalPart h0 = NormalPart::from(nf, modes);

    KamParams p;
    p.gamma = sec.get_double("gamma", p.gamma);
    p.tau = sec.get_double("tau", p.tau);
    p.K = static_cast<int>(sec.get_int("K", p.K));
    p.r_plus = sec.get_double("r_plus", p.r_plus);
    p.lie_tol = sec.get_double("lie_tol", p.lie_tol);
    p.lie_max_terms = static_cast<int>(sec.get_int("lie_max_terms", p.lie_max_terms));
    p.norm.a = sec.get_double("a", p.norm.a);
    p.norm.abar = sec.get_double("abar", p.norm.abar);
    p.norm.rho = sec.get_double("rho", p.norm.rho);
    p.norm.r = sec.get_double("r", p.norm.r);
    p.norm.s = sec.get_double("s", p.norm.s);
    p.norm.validate();

    PerturbationConfig pc;
    pc.K = static_cast<int>(sec.get_int("pert_K", p.K));
    pc.cubic_k_max = static_cast<int>(sec.get_int("cubic_k_max", pc.cubic_k_max));
    pc.include_cubic = sec.get_bool("include_cubic", pc.include_cubic);
    pc.include_action_square = sec.get_bool("include_action_square", pc.include_action_square);
    pc.scale = sec.get_double("scale", pc.scale);
    pc.seed = static_cast<std::uint64_t>(sec.get_int("seed", static_cast<long long>(pc.seed)));

    const auto all_modes = h0.modes();
    Outcome out;
    out.result = {{"command", "kamstep"},
                  {"sites", sites_json(S)},
                  {"modes", sites_json(all_modes)},
                  {"gamma", p.gamma},
                  {"tau", p.tau},
                  {"K", p.K},
                  {"scale", pc.scale},
                  {"seed", pc.seed}};
    KamState state{h0, random_perturbation(S, all_modes, pc)};
    try {
        const auto res = kam_step(state, p);
        out.result["stats"] = to_json(res.stats);
        out.result["status"] = "ok";
    } catch (const SmallDivisor& e) {
        out.result["status"] = "small_divisor";
        out.result["det"] = e.det();
        out.result["threshold"] = e.threshold();
        out.code = 2;
    }
    return out;
}

ConvolutionMethod method_of(const ConfigSection& sec) {
    const auto m = sec.get_string("method", "auto");
    if (m == "auto") return ConvolutionMethod::Auto;
    if (m == "direct") return ConvolutionMethod::Direct;
    if (m == "fft") return ConvolutionMethod::FFT;
    throw ConfigError(sec.name() + ".method", "expected auto, direct or fft");
}

Outcome cmd_simulate(const ConfigSection& sec) {
    sec.require_known({"sites", "sites_file", "xi", "phases", "window_radius", "dt", "T", "nl_coupling", "sample_every",
                       "method", "trajectory"});
    SimConfig cfg;
    cfg.S = native_sites(sec);
    cfg.xi = xi_of(sec, cfg.S.size());
    cfg.phases = sec.get_doubles("phases", {});
    cfg.window_radius = sec.get_double("window_radius", cfg.window_radius);
    cfg.dt = sec.get_double("dt", cfg.dt);
    cfg.T = sec.get_double("T", cfg.T);
    cfg.nl_coupling = sec.get_double("nl_coupling", cfg.nl_coupling);
    cfg.sample_every = static_cast<int>(sec.get_int("sample_every", cfg.sample_every));
    cfg.method = method_of(sec);
    cfg.validate();

    const ModeState init = init_state(cfg);
    const Trajectory tr = integrate(init, cfg);
    const auto predicted = predicted_shift(cfg.S, cfg.xi);

    json freqs = json::array();
    for (std::size_t j = 0; j < cfg.S.size(); ++j) {
        const auto est = measure_frequency(tr, cfg.S[j]);
        const double lin = static_cast<double>(lambda(cfg.S[j]));
        freqs.push_back({{"site", to_json(cfg.S[j])},
                         {"measured", est.frequency},
                         {"linear", lin},
                         {"measured_shift", est.frequency - lin},
                         {"predicted_shift", kShiftNormalization * cfg.nl_coupling * predicted[j]},
                         {"resolution", est.resolution}});
    }
    json momentum = json::array();
    for (const auto& p : tr.momentum) momentum.push_back(json::array({p[0], p[1]}));

    Outcome out;
    out.result = {{"command", "simulate"},
                  {"sites", sites_json(cfg.S)},
                  {"xi", cfg.xi},
                  {"dt", cfg.dt},
                  {"T", cfg.T},
                  {"nl_coupling", cfg.nl_coupling},
                  {"modes", sites_json(tr.modes)},
                  {"energy_drift", tr.max_relative_energy_drift()},
                  {"momentum_drift", tr.max_momentum_drift()},
                  {"t", tr.t},
                  {"H", tr.H},
                  {"momentum", momentum},
                  {"frequencies", freqs}};

    std::string csv = "t,mode,re,im\n";
    for (std::size_t s = 0; s < tr.t.size(); ++s) {
        const std::string t = g17(tr.t[s]) + ",";
        for (std::size_t m = 0; m < tr.modes.size(); ++m) {
            csv += t + std::to_string(m) + "," + g17(tr.q[s][m].real()) + "," + g17(tr.q[s][m].imag()) + "\n";
        }
    }
    out.trajectory_csv = std::move(csv);
    out.trajectory_path = sec.find("trajectory");
    return out;
}

const std::vector<std::pair<std::string, Command>>& table() {
    static const std::vector<std::pair<std::string, Command>> t = {
        {"sitegen", cmd_sitegen},   {"verify", cmd_verify},   {"classify", cmd_classify},
        {"normalform", cmd_normalform}, {"melnikov", cmd_melnikov}, {"measure", cmd_measure},
        {"schedule", cmd_schedule}, {"kamstep", cmd_kamstep}, {"simulate", cmd_simulate},
    };
    return t;
}

const Command* find_command(const std::string& name) {
    for (const auto& [n, c] : table()) {
        if (n == name) return &c;
    }
    return nullptr;
}

void write_file(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << bytes;
}

fs::path output_path(const std::string& command, const RunOptions& options) {
    if (!options.out_path.empty()) return options.out_path;
    if (const char* dir = std::getenv(kOutDirEnv); dir != nullptr && *dir != '\0') {
        return fs::path(dir) / (command + (options.format == "csv" ? ".csv" : ".json"));
    }
    return {};
}

int merge_code(int a, int b) {
    if (a == 1 || b == 1) return 1;
    return std::max(a, b);
}

RunResult run_checked(const std::string& command, const RunOptions& options) {
    if (options.format != "json" && options.format != "csv") {
        throw ConfigError("format", "expected json or csv");
    }
    Config cfg = options.config_path.empty() ? Config{} : load_config(options.config_path);
    for (const auto& [name, sec] : cfg.sections()) {
        if (!find_command(name)) throw ConfigError(name, "unknown section", sec.values().empty() ? 0 : sec.values().begin()->second.line);
    }

    RunResult rr;
    std::vector<Outcome> outcomes;
    if (command == "report") {
        for (const auto& [key, value] : options.overrides) {
            const auto dot = key.find('.');
            if (dot == std::string::npos) throw ConfigError(key, "report overrides take the form section.key");
            const std::string name = key.substr(0, dot);
            if (!find_command(name)) throw ConfigError(key, "unknown section");
            cfg.section_mut(name).set(key.substr(dot + 1), value);
        }
        if (options.format == "csv") throw ConfigError("format", "report is JSON only");
        for (const auto& [name, cmd] : table()) {
            if (const ConfigSection* sec = cfg.section(name)) outcomes.push_back(cmd(*sec));
        }
        if (outcomes.empty()) throw ConfigError("", "report needs at least one command section in the config");
    } else {
        const Command* cmd = find_command(command);
        if (!cmd) throw ConfigError("", "unknown command '" + command + "'");
        ConfigSection& sec = cfg.section_mut(command);
        for (const auto& [key, value] : options.overrides) sec.set(key, value);
        if (options.format == "csv" && command != "schedule") {
            throw ConfigError("format", "csv output is available for schedule only (simulate always writes its trajectory CSV)");
        }
        outcomes.push_back((*cmd)(sec));
    }

    json results = json::array();
    for (auto& o : outcomes) {
        results.push_back(o.result);
        rr.exit_code = merge_code(rr.exit_code, o.code);
    }
    rr.report = options.format == "csv" ? outcomes.front().csv : emit_report(results);

    const fs::path out = output_path(command, options);
    if (!out.empty()) {
        write_file(out, rr.report);
        rr.files.push_back(out.string());
    }
    for (const auto& o : outcomes) {
        if (o.trajectory_csv.empty()) continue;
        fs::path tpath;
        if (o.trajectory_path) {
            tpath = *o.trajectory_path;
        } else if (!out.empty()) {
            tpath = out;
            tpath.replace_extension(".trajectory.csv");
        }
        if (!tpath.empty()) {
            write_file(tpath, o.trajectory_csv);
            rr.files.push_back(tpath.string());
        }
    }
    rr.message = rr.exit_code == 0 ? "ok" : "domain check failed";
    return rr;
}

}  // namespace

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [n, c] : table()) v.push_back(n);
        v.push_back("report");
        return v;
    }();
    return names;
}

RunResult run(const std::string& command, const RunOptions& options) {
    RunResult rr;
    try {
        return run_checked(command, options);
    } catch (const SmallDivisor& e) {
        rr.exit_code = 2;
        rr.message = e.what();
    } catch (const std::exception& e) {
        rr.exit_code = 1;
        rr.message = e.what();
    }
    return rr;
}

std::vector<BigSite> load_sites_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("sites_file", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError("sites_file", std::string("bad JSON: ") + e.what());
        }
        if (j.is_object()) {
            if (!j.contains("results") || j["results"].empty() || !j["results"][0].contains("sites")) {
                throw ConfigError("sites_file", "JSON report without results[0].sites");
            }
            j = j["results"][0]["sites"];
        }
        std::vector<BigSite> out;
        for (const auto& p : j) {
            if (!p.is_array() || p.size() != 2) throw ConfigError("sites_file", "expected [n1, n2] pairs");
            BigSite s;
            for (int c = 0; c < 2; ++c) {
                const auto& v = p[static_cast<std::size_t>(c)];
                mpz_class& dst = c == 0 ? s.n1 : s.n2;
                if (v.is_string()) {
                    if (dst.set_str(v.get<std::string>(), 10) != 0) throw ConfigError("sites_file", "bad coordinate");
                } else if (v.is_number_integer()) {
                    dst = mpz_class(std::to_string(v.get<std::int64_t>()));
                } else {
                    throw ConfigError("sites_file", "coordinates must be integers or decimal strings");
                }
            }
            out.push_back(std::move(s));
        }
        return out;
    }
    return parse_sites(text);
}

}  // namespace kambeam
