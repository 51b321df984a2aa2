#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hbtd {

// Counter-based seedable generator (SplitMix64 core). Substreams are derived
// as state = mix(seed) ^ mix(golden * (stream + 1)), so substream(seed, x)
// for distinct x are independent and reproducible regardless of draw order.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);
  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }
  result_type operator()() { return next(); }

  std::uint64_t next();
  double uniform();                       // [0, 1)
  std::uint64_t uniform_below(std::uint64_t bound);

  double gamma(double shape);             // scale 1
  // Dirichlet draw; switches to log-space accumulation for tiny shapes so
  // concentrations like 1e-6 do not collapse to 0/0.
  std::vector<double> dirichlet(std::span<const double> alpha);
  // Index draw from unnormalized nonnegative weights.
  std::size_t categorical(std::span<const double> weights);
  // Index draw from unnormalized log-weights (log-sum-exp internally).
  std::size_t categorical_log(std::span<const double> log_weights);

 private:
  std::uint64_t state_;
  static std::uint64_t mix(std::uint64_t z);
};

}  // namespace hbtd
