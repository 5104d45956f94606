// Snapshot formats, CSV emission, JSON reports.
//
// Field snapshot (.iclf): magic "ICLF", version u16, model tag u8,
// dims (u32, u32), spacing f64, then the row-major f64 little-endian
// payload (spectral coefficients or lattice values).
// Chaos snapshot (.iccf): magic "ICCF", version u16, beta f64, eps f64,
// dims (u32, u32), spacing f64, interleaved (re, im) f64 payload.
// All multi-byte values little-endian; writes are byte-deterministic.
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ichaos/chaos.hpp"
#include "ichaos/field.hpp"

#include "json.hpp"

namespace ichaos {

inline constexpr std::uint16_t kSnapshotVersion = 1;

// Model tags stored in the ICLF header.
inline constexpr std::uint8_t kTagSpectral = 0;
inline constexpr std::uint8_t kTagExactScalingLattice = 1;

struct FieldSnapshot {
    std::uint16_t version = 0;
    std::uint8_t model_tag = 0;
    std::uint32_t rows = 0, cols = 0;
    double spacing = 0.0;  // 0 for spectral snapshots
    std::vector<double> payload;
};

void save_field(const std::string& path, const SpectralField& f);
void save_field(const std::string& path, const LatticeField& f);
FieldSnapshot load_field(const std::string& path);

struct ChaosSnapshot {
    std::uint16_t version = 0;
    double beta = 0.0;
    double eps = 0.0;
    std::uint32_t rows = 0, cols = 0;
    double spacing = 0.0;
    std::vector<std::complex<double>> payload;
};

void save_chaos(const std::string& path, const ChaosField& c);
ChaosSnapshot load_chaos(const std::string& path);

// CSV with full double round-trip precision (17 significant digits).
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);  // pre-formatted
    void close();

  private:
    struct Impl;
    Impl* impl_;
};

std::string format_double(double v);  // %.17g equivalent, stable across runs

// Reports keep insertion key order so repeated runs diff cleanly.
using Json = nlohmann::ordered_json;

void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

// FNV-1a over raw bytes; shard manifests use it to detect stale artifacts.
std::uint64_t fnv1a64(const void* data, std::size_t n_bytes);
std::uint64_t file_checksum(const std::string& path);

}  // namespace ichaos
