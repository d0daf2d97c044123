#pragma once

#include <map>
#include <string>

#include "choq/analysis.hpp"
#include "choq/grid.hpp"
#include "choq/params.hpp"
#include "choq/solvers.hpp"

namespace choq {

// CHQF binary field format, little-endian regardless of host:
//   magic "CHQF" | version u32 (=1) | dim u8 | dims u32 x dim |
//   half_width f64 | payload n^dim f64 row-major.
void write_field(const std::string& path, const Field& field);
Field read_field(const std::string& path);

// Plain `key = value` config with `#` comments. Unknown keys are an error.
struct RunConfig {
    ProblemParams params;
    int n = 64;
    double L = 16.0;
    std::string solver = "petviashvili"; // or "ngf"
    double rho = 1.0;                    // ngf target mass
    SolverOptions opts;
    std::string out_dir = ".";
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);
// CLI overrides on top of a parsed config, same key names.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

// JSON serialization (nlohmann-compatible text) for reports.
std::string functionals_to_json(const FunctionalValues& fv);
std::string certificate_to_json(const Certificate& cert);
std::string report_to_json(const SolveReport& rep);
std::string manifest_json(const RunConfig& cfg, const std::string& invocation);

void write_text(const std::string& path, const std::string& text);
void write_decay_csv(const std::string& path, const DecayFit& fit);

} // namespace choq
