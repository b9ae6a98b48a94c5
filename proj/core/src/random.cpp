#include "dyner/random.hpp"

#include <cmath>
#include <numbers>

namespace dyner {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kPathOffset = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t k = mix64(seed);
  for (std::uint64_t x : path) k = mix64(k ^ (x * kGamma + kPathOffset));
  return k;
}

std::uint64_t Stream::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double Stream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::exponential(double rate) noexcept {
  // U in [0,1) keeps log1p(-U) finite.
  return -std::log1p(-uniform()) / rate;
}

double Stream::normal() noexcept {
  // 1 - U lies in (0,1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Stream edge_stream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t i,
                   std::uint64_t j) noexcept {
  return Stream(derive_key(seed, {replicate, i, j}));
}

Stream aux_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t a, std::uint64_t b) noexcept {
  return Stream(derive_key(seed, {~0ULL, tag, a, b}));
}

}  // namespace dyner
