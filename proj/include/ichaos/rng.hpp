// Splittable counter-based random streams.
//
// Seed ledger (bit-exact, also documented in the README):
//   stream_seed = mix64(mix64(master_seed ^ GOLDEN*(campaign_tag+1))
//                         ^ GOLDEN*(replica_index+1))
// with GOLDEN = 0x9E3779B97F4A7C15 and mix64 the splitmix64 finalizer
//   z ^= z>>30; z *= 0xBF58476D1CE4E5B9; z ^= z>>27; z *= 0x94D049BB133111EB;
//   z ^= z>>31.
// Streams derived from distinct (campaign_tag, replica_index) pairs are
// statistically independent; numeric results depend only on the derived
// stream seed, never on thread scheduling.
#pragma once

#include <cmath>
#include <cstdint>

namespace ichaos {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64_fin(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t tag, std::uint64_t idx) {
    std::uint64_t z = mix64_fin(seed ^ (kGolden * (tag + 1)));
    return mix64_fin(z ^ (kGolden * (idx + 1)));
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += kGolden);
        return mix64_fin(z);
    }

    // Uniform in (0,1); 53-bit mantissa, never exactly 0 or 1.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

// Gaussian stream on top of splitmix64 (Marsaglia polar; rejection is
// deterministic per stream, so replica results are reproducible bit for bit).
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : sm_(seed) {}

    double uniform() { return sm_.uniform(); }
    std::uint64_t next_u64() { return sm_.next_u64(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * sm_.uniform() - 1.0;
            v = 2.0 * sm_.uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

private:
    SplitMix64 sm_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Fixed campaign tags; values are frozen so that seed ledgers stay valid
// across releases.
namespace campaign_tag {
inline constexpr std::uint64_t kLibrary = 0;  // library-internal substreams
inline constexpr std::uint64_t kMoments = 1;
inline constexpr std::uint64_t kScaling = 2;
inline constexpr std::uint64_t kLil = 3;
inline constexpr std::uint64_t kFastPoints = 4;
inline constexpr std::uint64_t kTail = 5;
inline constexpr std::uint64_t kBesov = 6;
inline constexpr std::uint64_t kWhiteNoise = 7;
inline constexpr std::uint64_t kConstantA = 8;
inline constexpr std::uint64_t kSampleField = 9;
}  // namespace campaign_tag

}  // namespace ichaos
