#pragma once

#include <cstdint>
#include <random>

namespace svrg {

// splitmix64 finalizer, used to derive independent child-stream seeds from a
// single experiment seed.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One generator per run; child streams keep data generation and index
// sampling decoupled so adding diagnostics never perturbs trajectories.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  static Rng child(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix_seed(seed ^ mix_seed(stream)));
  }

  // Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_);
  }

  // Uniform real in [0, 1).
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
  }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace svrg
