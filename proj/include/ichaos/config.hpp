// Campaign configuration: flat `key = value` text with `#` comments.
//
// Grammar (one entry per line):
//   line    := ws [entry] ws [comment]
//   entry   := key ws '=' ws value
//   key     := [A-Za-z_][A-Za-z0-9_]*
//   value   := everything up to the comment marker, trimmed
//   comment := '#' any
// Unknown keys are validation errors; validation collects every violation
// before throwing, not just the first.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ichaos {

enum class Campaign {
    Moments,
    Scaling,
    Lil,
    FastPoints,
    Tail,
    Besov,
    WhiteNoise,
    ConstantA,
    SampleField,
};

const char* campaign_name(Campaign c);
Campaign campaign_from_name(const std::string& name);  // throws ValidationError

struct ExperimentConfig {
    Campaign experiment = Campaign::SampleField;
    double beta = 1.0;              // beta^2 in (0,2)
    std::uint64_t master_seed = 1;
    long replicas = 100;
    int threads = 0;                // 0 = auto (ICHAOS_THREADS, then hardware)
    std::string output_dir = "out";

    // Field / lattice geometry.
    int lattice_n = 512;            // nodes per axis (power of two for lattices)
    int modes = 256;                // spectral truncation for the Dirichlet field
    double span = 1.05;             // lattice footprint half-width multiplier
    double scale_r = 1.0;           // kernel range R = scale_r (lattices use 2*span)

    // Chaos parameters.
    double eps = 0.0;               // 0 = derive from the radius ladder (min r / 8)
    std::string normalization = "wick";  // "wick" | "powerlaw"

    // Analysis knobs (campaign-specific; unused ones keep defaults).
    double r_min = 0.025, r_max = 0.2;  // radius ladder bounds
    int ladder_depth = 12;
    int probes = 50;
    double gauge_a = 0.5;           // fast-point / tail gauge parameter
    double delta = 0.1;
    int wavelet_levels = 8;
    double besov_p = 4.0;
    double besov_q = 0.0;           // 0 encodes q = infinity
    double window_r = 0.02;         // white-noise block scale
    long quad_points = 200000;      // quadrature / importance-sampling budget
    double w_cutoff = 8.0;          // constant-A far-field split

    bool operator==(const ExperimentConfig&) const = default;
};

// Parses and validates; throws ParseError on malformed lines and
// ValidationError (all offending fields listed) on constraint violations.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Emits every field explicitly; parse(serialize(cfg)) == cfg.
std::string serialize_config(const ExperimentConfig& cfg);

// Returns the violated field names without throwing (empty = valid).
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

}  // namespace ichaos
