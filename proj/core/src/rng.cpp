#include "hbtd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hbtd {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t Rng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : state_(mix(seed)) {}

Rng Rng::substream(std::uint64_t seed, std::uint64_t stream) {
  Rng r(0);
  r.state_ = mix(seed) ^ mix(kGolden * (stream + 1));
  return r;
}

std::uint64_t Rng::next() {
  state_ += kGolden;
  return mix(state_);
}

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound = 0");
  // rejection to avoid modulo bias
  const std::uint64_t limit = max() - max() % bound;
  std::uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return v % bound;
}

double Rng::gamma(double shape) {
  if (shape <= 0.0) throw std::invalid_argument("gamma: shape <= 0");
  if (shape < 1.0) {
    // boost via G(a) = G(a+1) * U^{1/a}
    const double g = gamma(shape + 1.0);
    double u = uniform();
    if (u <= 0.0) u = 0x1.0p-53;
    return g * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      // Box-Muller normal
      const double u1 = std::max(uniform(), 0x1.0p-53);
      const double u2 = uniform();
      x = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = std::max(uniform(), 0x1.0p-53);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<double> Rng::dirichlet(std::span<const double> alpha) {
  std::vector<double> out(alpha.size());
  const bool tiny =
      std::any_of(alpha.begin(), alpha.end(), [](double a) { return a < 0.05; });
  if (!tiny) {
    double sum = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      out[i] = gamma(alpha[i]);
      sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
  }
  // log-space: log G(a) = log G(a+1) + log(U)/a
  std::vector<double> lg(alpha.size());
  double lmax = -1e300;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double g = gamma(alpha[i] + 1.0);
    double u = std::max(uniform(), 0x1.0p-53);
    lg[i] = std::log(std::max(g, 1e-300)) + std::log(u) / alpha[i];
    lmax = std::max(lmax, lg[i]);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    out[i] = std::exp(lg[i] - lmax);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw std::invalid_argument("categorical: nonpositive total");
  double u = uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  return weights.size() - 1;
}

std::size_t Rng::categorical_log(std::span<const double> log_weights) {
  double lmax = -1e300;
  for (double lw : log_weights) lmax = std::max(lmax, lw);
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - lmax);
  return categorical(w);
}

}  // namespace hbtd
