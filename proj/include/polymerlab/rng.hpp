#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace polymerlab {

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Order-sensitive hash of a tuple of integers. Seeds for every replica are
// derived as hash64({base_seed, n, replica}); never sequential seeds.
std::uint64_t hash64(std::initializer_list<std::uint64_t> parts);

// A random stream: mt19937_64 seeded from a 64-bit value, plus the one
// uniform mapping used everywhere.
class Stream {
 public:
  using engine_type = std::mt19937_64;

  explicit Stream(std::uint64_t seed) : eng_(mix64(seed)) {}

  std::uint64_t next() { return eng_(); }

  // Uniform on the open interval (0,1): ((x >> 12) + 0.5) * 2^-52. With 53
  // bits the top value would round to exactly 1.
  double uniform() { return to_open_unit(eng_()); }

  void fill_uniform(std::span<double> out);

  engine_type& engine() { return eng_; }

  static double to_open_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
  }

 private:
  engine_type eng_;
};

}  // namespace polymerlab
