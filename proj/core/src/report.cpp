#include "kambeam/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

namespace kambeam {

namespace {

void emit(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::null:
            out += "null";
            break;
        case json::value_t::boolean:
            out += j.get<bool>() ? "true" : "false";
            break;
        case json::value_t::number_integer:
            out += std::to_string(j.get<std::int64_t>());
            break;
        case json::value_t::number_unsigned:
            out += std::to_string(j.get<std::uint64_t>());
            break;
        case json::value_t::number_float: {
            const double x = j.get<double>();
            if (!std::isfinite(x)) {
                out += "null";
                break;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            out += buf;
            if (std::strpbrk(buf, ".e") == nullptr) out += ".0";
            break;
        }
        case json::value_t::string:
            out += j.dump();
            break;
        case json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ',';
                first = false;
                emit(v, out);
            }
            out += ']';
            break;
        }
        case json::value_t::object: {
            // nlohmann::json objects are std::map backed, so iteration is key-sorted.
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                emit(it.value(), out);
            }
            out += '}';
            break;
        }
        default:
            throw PreconditionError("unsupported JSON value in report");
    }
}

}  // namespace

std::string emit_canonical(const json& j) {
    std::string out;
    emit(j, out);
    return out;
}

json make_report(json results) { return json{{"schema", kSchemaVersion}, {"results", std::move(results)}}; }

std::string emit_report(const json& results) { return emit_canonical(make_report(results)) + "\n"; }

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json to_json(const Site& s) { return json::array({s.n1, s.n2}); }

json to_json(const BigSite& s) { return json::array({s.n1.get_str(), s.n2.get_str()}); }

template <class Int>
static json entry_json(const BasicResonanceEntry<Int>& e) {
    return json{{"n", to_json(e.n)},
                {"m", to_json(e.m)},
                {"i", to_json(e.i)},
                {"j", to_json(e.j)},
                {"kind", to_string(e.kind)},
                {"i_index", e.i_index},
                {"j_index", e.j_index}};
}

json to_json(const ResonanceEntry& e) { return entry_json(e); }
json to_json(const BigResonanceEntry& e) { return entry_json(e); }

json to_json(const AdmissibilityReport<mpz_class>& r) {
    json v = json::array();
    for (const auto& viol : r.violations) {
        json w = json::array();
        for (const auto& s : viol.witness) w.push_back(to_json(s));
        v.push_back({{"kind", to_string(viol.kind)}, {"witness", w}});
    }
    return json{{"pass", r.pass},
                {"window", r.window},
                {"violations", v},
                {"type1_count", r.type1_count},
                {"type2_count", r.type2_count},
                {"sites_scanned", r.sites_scanned}};
}

json to_json(const Schedule& s) {
    json rows = json::array();
    for (std::size_t i = 0; i < s.size(); ++i) {
        rows.push_back({{"nu", i},
                        {"r", s.r[i]},
                        {"s", s.s[i]},
                        {"eps", s.eps[i]},
                        {"gamma", s.gamma[i]},
                        {"eta", s.eta[i]},
                        {"K", number_or_null(s.K[i])}});
    }
    return json{{"c", s.c}, {"tau", s.tau}, {"steps", rows}};
}

json to_json(const MeasureReport& m) {
    json per_k = json::object();
    for (const auto& [k, f] : m.per_k) per_k[std::to_string(k)] = f;
    return json{{"box", {{"lo", m.box.lo}, {"hi", m.box.hi}}},
                {"samples", m.samples},
                {"excluded", m.excluded},
                {"excluded_fraction", m.excluded_fraction},
                {"per_family",
                 {{"R_k", static_cast<double>(m.per_family.R_k) / static_cast<double>(m.samples)},
                  {"R_kn", static_cast<double>(m.per_family.R_kn) / static_cast<double>(m.samples)},
                  {"R_knm", static_cast<double>(m.per_family.R_knm) / static_cast<double>(m.samples)}}},
                {"per_k", per_k},
                {"per_k_slope", m.per_k_slope},
                {"k0_block_flags", m.k0_block_flags},
                {"resonant_pairs", m.resonant_pairs},
                {"scalar_levels", m.scalar_levels},
                {"gamma", m.gamma},
                {"tau", m.tau},
                {"K", m.K},
                {"window", m.window},
                {"seed", m.seed}};
}

json to_json(const KamStats& s) {
    return json{{"eps", s.eps},
                {"eps_plus", s.eps_plus},
                {"s_plus", s.s_plus},
                {"ratio", number_or_null(s.ratio)},
                {"margin", number_or_null(s.margin)},
                {"homological_residual", s.homological_residual},
                {"lie_terms", s.lie_terms},
                {"f_terms", s.f_terms},
                {"p_plus_terms", s.p_plus_terms}};
}

}  // namespace kambeam
