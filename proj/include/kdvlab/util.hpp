#pragma once
// Small shared utilities: deterministic RNG, a parallel_for that degrades to
// serial on single-core hosts, and printf-style string helpers.

#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace kdvlab {

// Deterministic 64-bit generator (splitmix64). Used directly and as the
// seeding stage for independent substreams; chosen over std::mt19937_64 +
// std::normal_distribution because the latter's variate stream is
// implementation-defined, and outputs here must be bit-reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (cached spare).
  double normal();

  // Derive an independent substream deterministically.
  Rng spawn() { return Rng(next_u64() ^ 0xd1b54a32d192ed03ull); }

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Chunked parallel loop over [0, n). Runs serially when the host reports a
// single hardware thread (or n is small); otherwise splits into one chunk per
// worker. `body(begin, end)` must be safe to run concurrently on disjoint
// ranges.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

// printf into a std::string.
std::string str_printf(const char* fmt, ...)
#if defined(__GNUC__)
    __attribute__((format(printf, 1, 2)))
#endif
    ;

// Shorthand used by norms and data laws: <n> = sqrt(1 + n²).
inline double bracket(double n) { return std::sqrt(1.0 + n * n); }

// FNV-1a over a byte string; used for config hashes in output headers.
uint64_t fnv1a64(std::string_view bytes);

}  // namespace kdvlab
