#ifndef AXDA_RNG_HPP
#define AXDA_RNG_HPP

#include <array>
#include <cstdint>

namespace axda {

// Counter-based reproducible random stream.  The generator is xoshiro256++
// seeded through splitmix64, so a stream is fully determined by the 64-bit
// value it was derived from.  Streams derived from (seed, stream, counter)
// tuples are what make block-parallel Gibbs sweeps bit-identical to serial
// ones: every consumer gets its own stream and nothing is shared.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform();

  // Standard normal via high-accuracy inverse-CDF transform.
  double normal();

  // Exponential with rate 1.
  double exponential();

 private:
  std::array<std::uint64_t, 4> state_;
};

// Deterministic stream derivation for (master seed, stream id, counter),
// e.g. (seed, block index, Gibbs iteration).
RngStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_id,
                        std::uint64_t counter);

// Inverse of the standard normal CDF, accurate to ~1 ulp after refinement.
double inverse_normal_cdf(double p);

}  // namespace axda

#endif
