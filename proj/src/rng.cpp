#include "polymerlab/rng.hpp"

namespace polymerlab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash64(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL ^ parts.size();
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

void Stream::fill_uniform(std::span<double> out) {
  for (double& u : out) u = to_open_unit(eng_());
}

}  // namespace polymerlab
