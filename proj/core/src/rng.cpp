#include "bsp/rng.hpp"

#include <cmath>
#include <numeric>

#include "bsp/error.hpp"

namespace bsp {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> Rng::philox(std::array<std::uint32_t, 4> ctr,
                                         std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

Rng::Rng(std::uint64_t seed) : key_(mix64(seed + 0x9e3779b97f4a7c15ull)) {}

void Rng::refill() {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(counter_),
      static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(key_),
                                            static_cast<std::uint32_t>(key_ >> 32)};
  const auto out = philox(ctr, key);
  ++counter_;
  buffer_[0] = (std::uint64_t{out[0]} << 32) | out[1];
  buffer_[1] = (std::uint64_t{out[2]} << 32) | out[3];
  available_ = 2;
}

Rng::result_type Rng::operator()() {
  if (available_ == 0) refill();
  return buffer_[2 - available_--];
}

Rng Rng::split(Stream purpose, std::uint64_t index) const {
  return split(static_cast<std::uint64_t>(purpose), index);
}

Rng Rng::split(std::uint64_t purpose, std::uint64_t index) const {
  Rng child(0);
  std::uint64_t k = mix64(key_ ^ mix64(purpose + 0x632be59bd9b4e019ull));
  k = mix64(k ^ mix64(index + 0x8cb92ba72f3d8dd7ull));
  child.key_ = k;
  return child;
}

double Rng::uniform() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) fail(ErrorKind::kInvalidArgument, "uniform_index with n = 0");
  // Rejection on the top of the range keeps the result exactly uniform.
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t x;
  do {
    x = (*this)();
  } while (x >= limit);
  return x % n;
}

bool Rng::bernoulli(double p) { return uniform() < p; }

double Rng::exponential(double rate) {
  if (!(rate > 0.0)) fail(ErrorKind::kInvalidArgument, "exponential rate must be positive");
  return -std::log(uniform()) / rate;
}

double Rng::normal() {
  // Box-Muller without caching so that each call consumes a fixed number of
  // words.
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::normal(double mean, double sd) { return mean + sd * normal(); }

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) fail(ErrorKind::kInvalidArgument, "gamma shape must be positive");
  if (shape < 1.0) {
    // Boost to shape + 1 and rescale (Marsaglia & Tsang, section 6).
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  const double s = x + y;
  // Both gammas can underflow for tiny shapes; fall back to the mean of the
  // two-point limit.
  if (!(s > 0.0)) return bernoulli(a / (a + b)) ? 1.0 : 0.0;
  return x / s;
}

std::vector<double> Rng::dirichlet(std::span<const double> alpha) {
  std::vector<double> out(alpha.size());
  double total = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    out[k] = gamma(alpha[k]);
    total += out[k];
  }
  if (!(total > 0.0)) {
    std::vector<double> a(alpha.begin(), alpha.end());
    std::fill(out.begin(), out.end(), 0.0);
    out[categorical(a)] = 1.0;
    return out;
  }
  for (double& v : out) v /= total;
  return out;
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      fail(ErrorKind::kInvalidArgument, "categorical weights must be finite and >= 0");
    }
    total += w;
  }
  if (!(total > 0.0)) fail(ErrorKind::kInvalidArgument, "categorical weights sum to zero");
  const double target = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    acc += weights[k];
    last_positive = k;
    if (target < acc) return k;
  }
  return last_positive;
}

}  // namespace bsp
