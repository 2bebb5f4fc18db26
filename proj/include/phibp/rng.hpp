#pragma once
// Counter-based pseudo-random streams with deterministic splitting.
//
// Every sampler in this library draws from an RngStream.  A stream is a
// (key, counter) pair pushed through the splitmix64 output mix, so draws
// depend only on the key and how many values this particular stream has
// produced, never on what other streams did.  child(i) derives a stream whose
// key is a hash of (parent key, i); giving each species / block / site its own
// child stream makes results reproducible under any evaluation order and under
// --jobs parallelism.

#include <cstdint>
#include <span>

namespace phibp {

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(seed) {}

  // Deterministic substream; independent of the parent's draw position.
  RngStream child(std::uint64_t index) const;

  std::uint64_t next_u64();

  double uniform();      // open (0, 1)
  double exponential();  // rate 1
  double normal();       // standard normal (Box-Muller)

  // Gamma(shape, rate) by Marsaglia-Tsang squeeze (with the u^(1/shape) boost
  // for shape < 1).
  double gamma(double shape, double rate = 1.0);

  // Poisson(mean) by Knuth's product-of-uniforms method, chunked so the
  // running product never underflows for large means.
  long poisson(double mean);

  // Positive alpha-stable, 0 < alpha < 1, normalized so that
  // E[exp(-t S)] = exp(-t^alpha)  (Kanter's representation).
  double positive_stable(double alpha);

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

// Index i with cdf[i-1] <= u < cdf[i] for one uniform draw (binary search);
// cdf must be nondecreasing with cdf.back() ~ 1.
std::size_t sample_from_cdf(RngStream& rng, std::span<const double> cdf);

}  // namespace phibp
