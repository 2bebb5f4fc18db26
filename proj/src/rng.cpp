#include "phibp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phibp {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream RngStream::child(std::uint64_t index) const {
  // Two mixing rounds decorrelate sibling keys and parent/child sequences.
  std::uint64_t k = mix64(key_ ^ 0xd1b54a32d192ed03ULL);
  k = mix64(k + mix64(index + kGolden));
  return RngStream(k);
}

std::uint64_t RngStream::next_u64() { return mix64(key_ + (++ctr_) * kGolden); }

double RngStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential() { return -std::log(uniform()); }

double RngStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

double RngStream::gamma(double shape, double rate) {
  if (shape <= 0.0 || rate <= 0.0)
    throw std::invalid_argument("gamma: shape and rate must be positive");
  if (shape < 1.0) {
    // Boost: G(a) = G(a+1) * U^(1/a).
    const double u = uniform();
    return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
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
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

long RngStream::poisson(double mean) {
  if (mean < 0.0) throw std::invalid_argument("poisson: mean must be >= 0");
  long n = 0;
  // Split additively so exp(-chunk) stays comfortably above underflow.
  while (mean > 0.0) {
    const double chunk = std::min(mean, 30.0);
    mean -= chunk;
    const double limit = std::exp(-chunk);
    double prod = uniform();
    while (prod > limit) {
      ++n;
      prod *= uniform();
    }
  }
  return n;
}

double RngStream::positive_stable(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("positive_stable: requires 0 < alpha < 1");
  // Kanter: S = (A(U)/E)^((1-alpha)/alpha) with
  //   A(u) = [ sin(a pi u)^a sin((1-a) pi u)^(1-a) / sin(pi u) ]^(1/(1-a)).
  const double pi = 3.14159265358979323846;
  const double u = uniform();
  const double e = exponential();
  const double log_a =
      (alpha * std::log(std::sin(alpha * pi * u)) +
       (1.0 - alpha) * std::log(std::sin((1.0 - alpha) * pi * u)) -
       std::log(std::sin(pi * u))) /
      (1.0 - alpha);
  return std::exp(((1.0 - alpha) / alpha) * (log_a - std::log(e)));
}

std::size_t sample_from_cdf(RngStream& rng, std::span<const double> cdf) {
  if (cdf.empty()) throw std::invalid_argument("sample_from_cdf: empty table");
  const double u = rng.uniform() * cdf.back();
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::size_t>(std::min<std::ptrdiff_t>(
      it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

}  // namespace phibp
