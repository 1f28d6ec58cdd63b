#include "islab/common.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace islab {

namespace {
std::atomic<int> g_threads{0};
}

int worker_threads() {
  int n = g_threads.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_worker_threads(int n) { g_threads.store(std::max(0, n)); }

void parallel_for_ranges(Index begin, Index end,
                         const std::function<void(Index, Index)>& body) {
  const Index n = end - begin;
  if (n <= 0) return;
  const int nt = std::min<Index>(worker_threads(), n);
  if (nt <= 1) {
    body(begin, end);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt - 1);
  const Index chunk = (n + nt - 1) / nt;
  for (int t = 1; t < nt; ++t) {
    const Index lo = begin + chunk * t;
    const Index hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  body(begin, std::min(end, begin + chunk));
  for (auto& th : pool) th.join();
}

void parallel_for(Index begin, Index end, const std::function<void(Index)>& body) {
  parallel_for_ranges(begin, end, [&body](Index lo, Index hi) {
    for (Index i = lo; i < hi; ++i) body(i);
  });
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

Real Rng::uniform() {
  return static_cast<Real>(next_u64() >> 11) * 0x1.0p-53;
}

Real Rng::normal() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_;
  }
  Real u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const Real u2 = uniform();
  const Real r = std::sqrt(-2.0 * std::log(u1));
  const Real a = 2.0 * kPi * u2;
  cached_ = r * std::sin(a);
  have_cached_ = true;
  return r * std::cos(a);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace islab
