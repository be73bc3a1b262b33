#ifndef LLMDEP_RANDOM_H_
#define LLMDEP_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace llmdep {

// Seeded generator whose draws are identical on every platform. The engine
// is std::mt19937_64, whose output sequence is fixed by the standard; the
// bounded draws below avoid std::uniform_*_distribution, whose results are
// implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }
  // Uniform integer in [0, bound). bound must be positive.
  uint64_t Below(uint64_t bound);
  // Uniform double in [0, 1) with 53 random bits.
  double Uniform();
  bool Bernoulli(double p) { return p > 0.0 && Uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// Mixes a top-level seed with a label (a sent_id, language code, ...) into an
// independent stream seed.
uint64_t DeriveSeed(uint64_t seed, std::string_view label);

}  // namespace llmdep

#endif  // LLMDEP_RANDOM_H_
