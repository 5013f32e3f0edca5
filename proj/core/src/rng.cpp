#include "haucl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace haucl {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RngStream RngStream::for_purpose(std::uint64_t root_seed, std::string_view purpose) {
  std::uint64_t mix = root_seed ^ fnv1a(purpose);
  // one scramble round so adjacent root seeds do not give adjacent states
  splitmix64(mix);
  return RngStream(mix);
}

std::uint64_t RngStream::next_u64() { return splitmix64(state_); }

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double RngStream::normal() {
  // u1 in (0,1] so the log is finite
  double u1 = 1.0 - uniform01();
  double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::gumbel(double eps) {
  double u = std::clamp(uniform01(), eps, 1.0 - eps);
  return -std::log(-std::log(u));
}

}  // namespace haucl
