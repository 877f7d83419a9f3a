#include "mineig/rng.hpp"

#include <cmath>

namespace mineig {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t avalanche(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

RngStream::RngStream(const SeedSpec& seed, std::uint64_t trial) {
  std::uint64_t s = avalanche(seed.master_seed + kGolden);
  s = avalanche(s ^ (seed.stream_id + kGolden));
  s = avalanche(s ^ (trial + kGolden));
  state_ = s;
}

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return avalanche(state_);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open01() { return 1.0 - uniform01(); }

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

int RngStream::categorical(const std::vector<double>& probs) {
  const double u = uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace mineig
