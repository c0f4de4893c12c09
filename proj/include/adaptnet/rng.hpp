#pragma once

#include <cstdint>
#include <random>

namespace adaptnet {

// splitmix64 finalizer. Only used to whiten seed material; never as the
// generator behind any distribution.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One pseudo-random stream. Streams derived from the same (master, tag, index)
// are bit-identical; distinct tags or indices give decorrelated streams, so
// trial t always sees the same draws no matter how trials are scheduled.
//
// The normal_distribution object is part of the stream state: the Gaussian
// engine produces values in pairs, and keeping the distribution alive keeps
// the pair cache aligned between two engines that must replay identical draws.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  static RngStream derive(std::uint64_t master, std::uint64_t tag,
                          std::uint64_t index = 0) {
    std::uint64_t s = mix64(master ^ mix64(tag));
    s = mix64(s ^ mix64(index + 0x2545f4914f6cdd1dULL));
    return RngStream(s);
  }

  double gauss() { return normal_(eng_); }
  double uniform() { return unif_(eng_); }
  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

// Stream tags. Distinct subsystems must never share one.
namespace tag {
inline constexpr std::uint64_t trial = 0x7452'6961'6c00'0001ULL;
inline constexpr std::uint64_t init = 0x696e'6974'0000'0002ULL;
inline constexpr std::uint64_t topology = 0x746f'706f'0000'0003ULL;
inline constexpr std::uint64_t noise_fit = 0x6e6f'6973'0000'0004ULL;
inline constexpr std::uint64_t property = 0x7072'6f70'0000'0005ULL;
}  // namespace tag

}  // namespace adaptnet
