#pragma once

#include <cstdint>
#include <vector>

namespace mineig {

/// Master seed plus stream id. Trial k of an experiment draws from the
/// substream keyed by (master_seed, stream_id, k), so Monte Carlo results are
/// bit-identical for any worker count or trial schedule.
struct SeedSpec {
  std::uint64_t master_seed = 0x5DEECE66DULL;
  std::uint64_t stream_id = 0;
};

/// Counter-derived substream: a SplitMix64 sequence whose initial state is an
/// avalanche mix of (master_seed, stream_id, trial). All draws are computed
/// from integer operations only, so streams are platform-independent.
class RngStream {
public:
  RngStream(const SeedSpec& seed, std::uint64_t trial);

  std::uint64_t next_u64();
  double uniform01();       // [0, 1)
  double uniform_open01();  // (0, 1]
  /// Standard normal via the Marsaglia polar method (pairs cached).
  double normal();
  /// Index into a probability vector (inverse CDF walk; final atom absorbs
  /// the rounding remainder).
  int categorical(const std::vector<double>& probs);
  bool bernoulli(double p) { return uniform01() < p; }
  int rademacher() { return (next_u64() >> 63) ? 1 : -1; }

private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mineig
