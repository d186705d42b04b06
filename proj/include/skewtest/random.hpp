#pragma once

// Counter-based random streams. Every value is a pure function of
// (key, counter), so results do not depend on call order or threading.

#include <cstdint>
#include <initializer_list>

namespace skewtest {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Folds a sequence of words into one key. Order matters.
constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (auto w : words) h = splitmix64(h ^ splitmix64(w));
  return h;
}

class CounterStream {
 public:
  explicit constexpr CounterStream(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return splitmix64(key_ ^ splitmix64(counter + 0x2545f4914f6cdd1dULL));
  }

  // Uniform on the open interval (0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const noexcept {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace skewtest
