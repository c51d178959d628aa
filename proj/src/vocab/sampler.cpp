#include "recoding/vocab/sampler.hpp"

#include "recoding/util/hash.hpp"

namespace recoding::vocab {

SeededSampler::SeededSampler(std::uint64_t seed, std::string_view stream_id)
    : seed_(seed), stream_id_(stream_id), stream_key_(hash::combine(seed, stream_id)) {}

std::uint64_t SeededSampler::next_u64() {
  return hash::splitmix64(stream_key_ ^ hash::splitmix64(index_++));
}

std::uint64_t SeededSampler::next_below(std::uint64_t bound) {
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x < limit) return x % bound;
  }
}

double SeededSampler::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool SeededSampler::bernoulli(double p) {
  if (p <= 0.0) {
    ++index_;
    return false;
  }
  return next_unit() < p;
}

SeededSampler SeededSampler::fork(std::string_view child) const {
  std::string id = stream_id_;
  id += '/';
  id += child;
  return SeededSampler(seed_, id);
}

}  // namespace recoding::vocab
