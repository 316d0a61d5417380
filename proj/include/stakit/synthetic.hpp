#ifndef STAKIT_SYNTHETIC_HPP
#define STAKIT_SYNTHETIC_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "stakit/sta.hpp"

namespace stakit {

/** SplitMix64, the fixed portable generator behind every seeded command.
 * Identical output on every platform for a given seed; uniform doubles take
 * the top 53 bits of the state mix.
 */
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }
    std::uint64_t below(std::uint64_t n) { return next() % n; }
};

/** Four-group synthetic activation dataset on a grid: every sample is a
 * single-vertex impulse at one of two activation frames inside one of two
 * regions, with uniform random amplitude, Gaussian-smoothed along time and
 * space (kernels peak-normalized, truncated at four sigmas, so values far
 * from the activation are exactly zero).
 */
struct BlobSpec {
    int grid_h = 16;
    int grid_w = 16;
    int t_len = 20;
    int t1 = 5;  // 1-based activation frames
    int t2 = 15;
    int n_per_group = 10;
    std::vector<int> region_a; // vertex indices, row-major bin = row * w + col
    std::vector<int> region_b;
    double amp_min = 1.0;
    double amp_max = 3.0;
    double sigma_time = 1.0;
    double sigma_space = 1.0;
    std::uint64_t seed = 42;

    void validate() const;

    /// Vertex indices of the inclusive cell rectangle [r0..r1] x [c0..c1].
    static std::vector<int> rect(int grid_w, int r0, int c0, int r1, int c1);
};

/// Group label of sample index g in {0..3}: rA_t<t1>, rA_t<t2>, rB_t<t1>, rB_t<t2>.
std::string blob_group_label(const BlobSpec& spec, int group);

/// The 4 * n_per_group series in fixed group-major order, fully determined
/// by the seed. Every emitted value is >= 0.
std::vector<SpatioTemporalSeries> generate_blobs(const BlobSpec& spec,
                                                 std::shared_ptr<const GroundGeometry> geometry);

} // namespace stakit

#endif
