#include "ichaos/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ichaos/errors.hpp"

namespace ichaos {

namespace {

const char* kCampaignNames[] = {
    "moments", "scaling", "lil", "fastpoints", "tail",
    "besov",   "whitenoise", "constant-a", "sample-field",
};

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(k[0])) && k[0] != '_') return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Setters return false when the raw value does not parse as the field's type;
// range constraints are validate_config's job so they report under one roof.
struct Parsed {
    bool ok = false;
    double d = 0.0;
    long long ll = 0;
    std::uint64_t u64 = 0;
};

Parsed parse_double(const std::string& v) {
    Parsed p;
    char* end = nullptr;
    p.d = std::strtod(v.c_str(), &end);
    p.ok = end == v.c_str() + v.size() && !v.empty();
    return p;
}

Parsed parse_int(const std::string& v) {
    Parsed p;
    char* end = nullptr;
    p.ll = std::strtoll(v.c_str(), &end, 10);
    p.ok = end == v.c_str() + v.size() && !v.empty();
    return p;
}

Parsed parse_u64(const std::string& v) {
    Parsed p;
    char* end = nullptr;
    if (!v.empty() && v[0] == '-') return p;
    p.u64 = std::strtoull(v.c_str(), &end, 10);
    p.ok = end == v.c_str() + v.size() && !v.empty();
    return p;
}

bool is_pow2(long v) {
    return v > 0 && (v & (v - 1)) == 0;
}

}  // namespace

const char* campaign_name(Campaign c) {
    return kCampaignNames[static_cast<int>(c)];
}

Campaign campaign_from_name(const std::string& name) {
    for (int i = 0; i < 9; ++i)
        if (name == kCampaignNames[i]) return static_cast<Campaign>(i);
    throw ValidationError({"experiment"}, "unknown campaign: " + name);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::vector<std::string> bad;  // field names with unparseable or unknown entries
    std::string bad_detail;

    const auto flag = [&](const std::string& field, const std::string& why) {
        bad.push_back(field);
        if (!bad_detail.empty()) bad_detail += "; ";
        bad_detail += why;
    };

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string entry = trim(line);
        if (entry.empty()) continue;

        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw ParseError(line_no, "expected `key = value`: " + entry);
        const std::string key = trim(entry.substr(0, eq));
        const std::string value = trim(entry.substr(eq + 1));
        if (!valid_key(key))
            throw ParseError(line_no, "bad key `" + key + "`");
        if (value.empty())
            throw ParseError(line_no, "empty value for `" + key + "`");

        const auto num = [&](double* dst) {
            const Parsed p = parse_double(value);
            if (p.ok)
                *dst = p.d;
            else
                flag(key, key + ": not a number: " + value);
        };
        const auto integer = [&](auto* dst, long long lo, long long hi) {
            const Parsed p = parse_int(value);
            if (p.ok && p.ll >= lo && p.ll <= hi)
                *dst = static_cast<std::remove_pointer_t<decltype(dst)>>(p.ll);
            else
                flag(key, key + ": not an integer in range: " + value);
        };

        if (key == "experiment") {
            try {
                cfg.experiment = campaign_from_name(value);
            } catch (const ValidationError&) {
                flag("experiment", "experiment: unknown campaign " + value);
            }
        } else if (key == "beta") {
            num(&cfg.beta);
        } else if (key == "master_seed") {
            const Parsed p = parse_u64(value);
            if (p.ok)
                cfg.master_seed = p.u64;
            else
                flag("master_seed", "master_seed: not an unsigned integer: " + value);
        } else if (key == "replicas") {
            integer(&cfg.replicas, 0, 1000000000LL);
        } else if (key == "threads") {
            integer(&cfg.threads, 0, 4096);
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "lattice_n") {
            integer(&cfg.lattice_n, 1, 1 << 20);
        } else if (key == "modes") {
            integer(&cfg.modes, 1, 1 << 20);
        } else if (key == "span") {
            num(&cfg.span);
        } else if (key == "scale_r") {
            num(&cfg.scale_r);
        } else if (key == "eps") {
            num(&cfg.eps);
        } else if (key == "normalization") {
            cfg.normalization = value;
        } else if (key == "r_min") {
            num(&cfg.r_min);
        } else if (key == "r_max") {
            num(&cfg.r_max);
        } else if (key == "ladder_depth") {
            integer(&cfg.ladder_depth, 1, 64);
        } else if (key == "probes") {
            integer(&cfg.probes, 1, 1000000);
        } else if (key == "gauge_a") {
            num(&cfg.gauge_a);
        } else if (key == "delta") {
            num(&cfg.delta);
        } else if (key == "wavelet_levels") {
            integer(&cfg.wavelet_levels, 1, 24);
        } else if (key == "besov_p") {
            num(&cfg.besov_p);
        } else if (key == "besov_q") {
            num(&cfg.besov_q);
        } else if (key == "window_r") {
            num(&cfg.window_r);
        } else if (key == "quad_points") {
            integer(&cfg.quad_points, 1, 4000000000LL);
        } else if (key == "w_cutoff") {
            num(&cfg.w_cutoff);
        } else {
            flag(key, "unknown key: " + key);
        }
    }

    for (const std::string& f : validate_config(cfg)) flag(f, f + ": out of range");
    if (!bad.empty()) throw ValidationError(bad, bad_detail);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "experiment = " << campaign_name(cfg.experiment) << '\n'
        << "beta = " << fmt_double(cfg.beta) << '\n'
        << "master_seed = " << cfg.master_seed << '\n'
        << "replicas = " << cfg.replicas << '\n'
        << "threads = " << cfg.threads << '\n'
        << "output_dir = " << cfg.output_dir << '\n'
        << "lattice_n = " << cfg.lattice_n << '\n'
        << "modes = " << cfg.modes << '\n'
        << "span = " << fmt_double(cfg.span) << '\n'
        << "scale_r = " << fmt_double(cfg.scale_r) << '\n'
        << "eps = " << fmt_double(cfg.eps) << '\n'
        << "normalization = " << cfg.normalization << '\n'
        << "r_min = " << fmt_double(cfg.r_min) << '\n'
        << "r_max = " << fmt_double(cfg.r_max) << '\n'
        << "ladder_depth = " << cfg.ladder_depth << '\n'
        << "probes = " << cfg.probes << '\n'
        << "gauge_a = " << fmt_double(cfg.gauge_a) << '\n'
        << "delta = " << fmt_double(cfg.delta) << '\n'
        << "wavelet_levels = " << cfg.wavelet_levels << '\n'
        << "besov_p = " << fmt_double(cfg.besov_p) << '\n'
        << "besov_q = " << fmt_double(cfg.besov_q) << '\n'
        << "window_r = " << fmt_double(cfg.window_r) << '\n'
        << "quad_points = " << cfg.quad_points << '\n'
        << "w_cutoff = " << fmt_double(cfg.w_cutoff) << '\n';
    return out.str();
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> bad;
    const auto check = [&](bool ok, const char* field) {
        if (!ok) bad.push_back(field);
    };

    // beta = 0 is legal: the chaos degenerates to deterministic volume and the
    // moment campaign exercises its analytic branch against it.
    check(std::isfinite(cfg.beta) && cfg.beta >= 0.0 && cfg.beta * cfg.beta < 2.0, "beta");
    check(cfg.replicas >= 1, "replicas");
    check(cfg.threads >= 0, "threads");
    check(!cfg.output_dir.empty(), "output_dir");
    check(is_pow2(cfg.lattice_n) && cfg.lattice_n >= 8 && cfg.lattice_n <= 16384, "lattice_n");
    check(cfg.modes >= 64 && cfg.modes <= 4096, "modes");
    check(std::isfinite(cfg.span) && cfg.span >= 1.0 && cfg.span <= 16.0, "span");
    check(std::isfinite(cfg.scale_r) && cfg.scale_r > 0.0, "scale_r");
    check(std::isfinite(cfg.eps) && cfg.eps >= 0.0 && cfg.eps < 0.5, "eps");
    check(cfg.normalization == "wick" || cfg.normalization == "powerlaw", "normalization");
    check(std::isfinite(cfg.r_min) && cfg.r_min > 0.0 && cfg.r_min <= cfg.r_max, "r_min");
    check(std::isfinite(cfg.r_max) && cfg.r_max < 0.5, "r_max");
    check(cfg.ladder_depth >= 1 && cfg.ladder_depth <= 32, "ladder_depth");
    check(cfg.probes >= 1, "probes");
    check(std::isfinite(cfg.gauge_a) && cfg.gauge_a > 0.0 && cfg.gauge_a < 1.0, "gauge_a");
    check(std::isfinite(cfg.delta) && cfg.delta > 0.0 && cfg.delta < 1.0, "delta");
    check(cfg.wavelet_levels >= 1 && cfg.wavelet_levels <= 20, "wavelet_levels");
    check(std::isfinite(cfg.besov_p), "besov_p");
    check(std::isfinite(cfg.besov_q) && cfg.besov_q >= 0.0, "besov_q");
    check(std::isfinite(cfg.window_r) && cfg.window_r > 0.0 && cfg.window_r < 0.25, "window_r");
    check(cfg.quad_points >= 100, "quad_points");
    check(std::isfinite(cfg.w_cutoff) && cfg.w_cutoff >= 8.0, "w_cutoff");
    return bad;
}

}  // namespace ichaos
