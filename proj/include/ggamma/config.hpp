#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ggamma/report.hpp"

namespace ggamma {

// One run of the pipeline as read from a config file.  Exactly one of
// `reduced` / `original` is set; the weights are named after the block
// (u, delta, v, w for reduced; w1, w2, delta1, delta2 for original).
struct RunConfig {
    std::string name;
    std::optional<ParamTriple> reduced;
    std::optional<OriginalExponents> original;
    double L = 1.0;
    double L_trunc = 1e6;
    WeightSpec u, delta, v, w;           // reduced block
    WeightSpec w1, w2, delta1, delta2;   // original block
    ReportSettings settings;
    std::string report_path;  // empty: stdout
    std::string curves_path;  // empty: none

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& c);
// Commented template with every default spelled out.
std::string config_template();

// Reduced exponents and weights for a config, reducing the original block if needed.
std::pair<ParamTriple, WeightSet> resolve(const RunConfig& c);

// Runs the whole chain and writes the JSON report to c.report_path (when set).
EmbeddingReport run_embed_check(const RunConfig& c);

// One CSV row per config in input order; failures land in the error column.
std::string run_suite(const std::vector<RunConfig>& configs, unsigned jobs);

void export_curves(const ParamTriple& par, const WeightSet& ws, const Grid& grid, const std::string& path);

// CSV k,x_k,h,rho,zone for CS(φ, U^p, a); zone belongs to the interval (x_{k-1}, x_k).
std::string covering_table(const RunConfig& c);

// Estimate, budget provenance and the witness as CSV.
std::string oracle_summary(const RunConfig& c);

// Input CSV with columns a,b (header optional).  Prints the closed-form
// constant and, with trials > 0, the brute-force lower bound.
std::string hardy_discrete_summary(const std::string& csv, const ParamTriple& par, int trials, std::uint64_t seed,
                                   unsigned jobs);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace ggamma
