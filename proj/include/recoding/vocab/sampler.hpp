#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace recoding::vocab {

/// Counter-based deterministic random stream.
///
/// Every draw is a pure function of (seed, stream id, draw index), so a
/// sequence is reproducible across processes and platforms without relying
/// on the standard library's distribution implementations.
class SeededSampler {
 public:
  SeededSampler(std::uint64_t seed, std::string_view stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& stream_id() const noexcept { return stream_id_; }
  std::uint64_t draw_index() const noexcept { return index_; }

  // Raw 64-bit draw; advances the index.
  std::uint64_t next_u64();

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 bits of precision.
  double next_unit();

  bool bernoulli(double p);

  // Independent child stream, e.g. one per run.
  SeededSampler fork(std::string_view child) const;

 private:
  std::uint64_t seed_;
  std::string stream_id_;
  std::uint64_t stream_key_;
  std::uint64_t index_ = 0;
};

}  // namespace recoding::vocab
