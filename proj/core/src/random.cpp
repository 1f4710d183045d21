#include "irsguard/random.hpp"

#include <cmath>

namespace irsguard {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = mix64(base);
  for (auto t : tags) s = mix64(s ^ mix64(t + 0x632BE59BD9B4E019ULL));
  return s;
}

double uniform01(Rng& rng) {
  // 53 random bits in [0, 1)
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

cd complex_gaussian(Rng& rng) {
  // Box-Muller on our own uniform source keeps streams identical across
  // standard-library implementations.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  const double r = std::sqrt(-std::log(u1));  // variance 1/2 per component
  const double a = 2.0 * 3.14159265358979323846 * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace irsguard
