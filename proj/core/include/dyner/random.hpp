#pragma once

#include <cstdint>
#include <initializer_list>

namespace dyner {

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Folds a path of integers into a 64-bit key:
///   k0 = mix64(seed), k_{m+1} = mix64(k_m ^ (x_m * 0x9E3779B97F4A7C15 + 0xD1B54A32D192ED03)).
std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

/// Counter-based random stream. Draw number c (0-based) is
///   mix64(key + (c + 1) * 0x9E3779B97F4A7C15),
/// so any draw of any stream is a pure function of (key, c). This is the
/// SplitMix64 generator started at state `key`; it is part of the external
/// contract and must not change.
class Stream {
 public:
  explicit Stream(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t position() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0,1) with 53 random bits.
  double uniform() noexcept;

  /// Exp(rate) by inversion: -log1p(-U) / rate.
  double exponential(double rate) noexcept;

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Standard normal (Box-Muller, consumes two draws, no caching).
  double normal() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stream for edge (i,j) of replicate `replicate`: key = derive_key(seed, {replicate, i, j}).
Stream edge_stream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t i, std::uint64_t j) noexcept;

/// Stream for auxiliary per-purpose randomness (triple selection, bootstrap, ...).
/// `tag` separates purposes; it is mixed in as a 4-element path {~0, tag, a, b}
/// so it cannot collide with edge streams of realistic replicate counts.
Stream aux_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t a = 0, std::uint64_t b = 0) noexcept;

}  // namespace dyner
