// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_RANDOM_HPP
#define MFLR_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace mflr
{

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for a named stream: every random draw in the library derives
// from one root seed through a chain of (tag, counter) pairs.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path)
{
  std::uint64_t s = mix64(root);
  for (std::uint64_t p : path)
  {
    s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  }
  return s;
}

// Stream tags.
enum class Stream : std::uint64_t
{
  HfPool = 1,
  TestSet = 2,
  Train = 3,
  LfDraw = 4,
  Generator = 5,
  Noise = 6,
  Lhs = 7,
  Subsample = 8
};

inline std::uint64_t tag(Stream s)
{
  return static_cast<std::uint64_t>(s);
}

// mt19937_64 with portable uniform/normal/index helpers, so that results do
// not depend on the standard library's distribution implementations.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal()
  {
    if (has_spare_)
    {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0)
    {
      u1 = uniform();
    }
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform index in [0, n).
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

  template <typename T>
  void shuffle(std::vector<T> &v)
  {
    for (std::size_t i = v.size(); i > 1; --i)
    {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mflr

#endif  // MFLR_RANDOM_HPP
