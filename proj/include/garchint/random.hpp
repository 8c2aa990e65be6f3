#pragma once

#include <array>
#include <cstdint>

namespace garchint {

// Philox4x32-10 (Salmon et al., SC'11). A keyed bijection on 128-bit counters.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

// One reproducible random stream per (seed, stream index). The seed is the key,
// the stream index fills the upper counter words and the lower words count
// blocks, so streams never overlap and any path's draws are independent of
// which thread produced them.
class PhiloxStream {
public:
    using result_type = std::uint32_t;

    PhiloxStream(std::uint64_t seed, std::uint64_t stream_index);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return 0xffffffffu; }

    result_type operator()();
    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform on (0, 1).
    double uniform_open();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_; }
    std::uint64_t blocks_used() const { return block_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    PhiloxCounter buffer_{};
    int used_ = 4;
};

PhiloxStream derive_substream(std::uint64_t seed, std::uint64_t path_index);

// Poisson variate: sequential inversion for mean < 10, Hormann's PTRS above.
std::uint64_t sample_poisson(PhiloxStream& rng, double mean);

double sample_exponential(PhiloxStream& rng, double mean);

// Box-Muller, cosine branch only so every call consumes exactly two uniforms.
double sample_standard_normal(PhiloxStream& rng);

// Marsaglia-Tsang; shape < 1 is boosted through shape + 1.
double sample_gamma(PhiloxStream& rng, double shape, double scale);

}  // namespace garchint
