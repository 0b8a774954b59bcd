// Experiment runner behind the decoscatter binary: JSON config in, CSV/JSON
// tables out.  Everything in here is deterministic - no clocks, no RNG - so
// rerunning a config reproduces every output byte for byte; the manifest
// carries an FNV-1a hash of the canonicalized config for provenance.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "decoscatter/lindblad.hpp"
#include "decoscatter/oracle_grid.hpp"
#include "decoscatter/spin_bath.hpp"
#include "decoscatter/wavepacket.hpp"

namespace deco {

inline constexpr const char* kExperiments[] = {
    "amplitudes", "narrow", "full-density", "oracle-validate",
    "entropy-scan", "lindblad", "contrast",
};

struct ExperimentConfig {
    std::string experiment;
    ModelParams params{};
    PacketSpec spec{};
    GridOracleConfig oracle{};    // oracle-validate
    LindbladConfig lindblad{};    // lindblad, contrast
    int grid_n = 4096;            // momentum bins for full-density
    int scan_points = 400;        // entropy-scan
    double scan_k_min = 0.0;      // 0 selects 0.01*m*|mu|
    double scan_k_max = 0.0;      // 0 selects 100*m*|mu|*N
    double k_probe = 0.0;         // amplitudes; 0 selects spec.k0
    std::vector<std::string> formats{"csv"};
    int threads = 1;
};

// Strict parse: unknown keys, wrong types, and out-of-range values all throw
// std::invalid_argument naming the offending field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

// Stage-two validation (library-level invariants of every section the chosen
// experiment touches); also throws std::invalid_argument.
void validate_config(const ExperimentConfig& cfg);

struct OutputFile {
    std::string name;
    std::string contents;
};

struct RunResult {
    std::vector<OutputFile> files;  // data files plus the trailing manifest.json
};

RunResult run(const ExperimentConfig& cfg);

// Writes result files into out_dir (created if missing), in listed order.
void write_outputs(const RunResult& result, const std::string& out_dir);

struct ScanResult {
    std::vector<double> k0;
    std::vector<double> p_reflect;
    std::vector<double> entropy;
    double max_entropy = 0.0;
    double k0_at_max = 0.0;
};

// Fixed-momentum bath entropy H(sum_j w_j |A_j|^2) over a log grid of probe
// momenta.  Throws std::runtime_error if any point exceeds ln 2 + 1e-10,
// which would falsify the single-binary-outcome picture.
ScanResult entropy_scan(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes);

// Canonical form actually hashed: defaults materialized, keys sorted,
// execution details (threads, formats) excluded.
std::string canonical_config_json(const ExperimentConfig& cfg);

}  // namespace deco
