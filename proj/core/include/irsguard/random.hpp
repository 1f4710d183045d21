#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "irsguard/numeric.hpp"

namespace irsguard {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Deterministic sub-seed for a (base, tag...) tuple; used so that every
// random stream is addressable independently of generation order.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

// Standard circularly-symmetric complex Gaussian sample, E|z|^2 = 1.
cd complex_gaussian(Rng& rng);

double uniform01(Rng& rng);

}  // namespace irsguard
