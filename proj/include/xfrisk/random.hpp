#pragma once

// Counter-free, splittable random streams.
//
// Every random decision in a realization is drawn from its own stream whose
// seed is a hash of (realization seed, meter, year, purpose). Results are
// therefore independent of thread scheduling and iteration order.
//
// Distributions are sampled by inverse transform (Weibull) and Box-Muller
// (normal) on top of a 53-bit uniform, so sequences are identical across
// standard library implementations.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <string_view>

namespace xfrisk {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive hash of a word sequence:
/// h0 = mix64(len), h_{i+1} = mix64(h_i ^ mix64(w_i)).
constexpr std::uint64_t hash64(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(words.size()));
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
  return h;
}

/// FNV-1a over the bytes, then mixed.
constexpr std::uint64_t hash_string(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

/// Purpose tags for sub-stream derivation. Values are part of the
/// reproducibility contract; never renumber.
enum class StreamTag : std::uint64_t {
  AdoptHeatPump = 1,
  AdoptElectricVehicle = 2,
  HeatPumpDevice = 3,
  ElectricVehicleDevice = 4,
  Driving = 5,
  Synthetic = 100,
};

/// Child seed for realization `index` under `master_seed`.
constexpr std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return hash64({master_seed, index});
}

constexpr std::uint64_t substream_seed(std::uint64_t realization, std::uint64_t entity,
                                       std::int64_t year, StreamTag tag) noexcept {
  return hash64({realization, entity, static_cast<std::uint64_t>(year),
                 static_cast<std::uint64_t>(tag)});
}

/// splitmix64 generator. Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr RandomStream(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Weibull(shape, scale) by inverse CDF.
  double weibull(double shape, double scale) noexcept {
    return scale * std::pow(-std::log1p(-uniform()), 1.0 / shape);
  }

  /// Normal(mean, sd) by Box-Muller; consumes two uniforms per draw.
  double normal(double mean, double sd) noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + sd * z;
  }

 private:
  std::uint64_t state_;
};

}  // namespace xfrisk
