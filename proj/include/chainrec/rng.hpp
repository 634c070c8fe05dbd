#pragma once

#include <cmath>
#include <cstdint>

namespace chainrec {

// Counter-based generator (splitmix64 finalizer over key+counter).  Every
// draw is a pure hash of (key, counter), so forked streams keyed by a stable
// id (box index, trial index, ...) produce the same values no matter how
// work is scheduled across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(mix64(seed + 0x9e3779b97f4a7c15ull) ^
                   mix64(stream + 0xd6e8feb86659fd93ull))) {}

  // Independent stream derived from this one; does not advance the parent.
  Rng fork(std::uint64_t stream) const {
    Rng r(0);
    r.key_ = mix64(key_ ^ mix64(stream + 0xbf58476d1ce4e5b9ull));
    return r;
  }

  std::uint64_t next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ull * ++ctr_); }

  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }  // [0,1)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int uniform_int(int n) { return int(next_u64() % std::uint64_t(n > 0 ? n : 1)); }

  // Marsaglia polar would need state; a single Box-Muller branch is enough here.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  static std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace chainrec
