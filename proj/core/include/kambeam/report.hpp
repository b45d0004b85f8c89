#pragma once

// Canonical JSON reports: sorted keys, doubles at 17 significant digits,
// big integers as decimal strings, "schema": 1.

#include <string>

#include <nlohmann/json.hpp>

#include "kambeam/divisors.hpp"
#include "kambeam/homological.hpp"
#include "kambeam/lattice.hpp"
#include "kambeam/normalform.hpp"
#include "kambeam/simulator.hpp"

namespace kambeam {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Byte-stable serialization. Non-finite doubles become null.
std::string emit_canonical(const json& j);

// {"results": [...], "schema": 1}
json make_report(json results = json::array());
std::string emit_report(const json& results);

json to_json(const Site& s);
json to_json(const BigSite& s);  // decimal strings
json to_json(const ResonanceEntry& e);
json to_json(const BigResonanceEntry& e);
json to_json(const AdmissibilityReport<mpz_class>& r);
json to_json(const Schedule& s);
json to_json(const MeasureReport& m);
json to_json(const KamStats& s);

// Finite doubles pass through, others map to null.
json number_or_null(double x);

}  // namespace kambeam
