#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace islab {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;

inline constexpr Real kPi = 3.14159265358979323846;

/// Number of worker threads used by parallel loops (process-wide).
int worker_threads();
void set_worker_threads(int n);

/// Chunked parallel map over [begin, end). Each index is visited exactly once
/// and writes must be disjoint; results do not depend on the thread count.
void parallel_for(Index begin, Index end, const std::function<void(Index)>& body);

/// Variant handing each worker a contiguous [lo, hi) range.
void parallel_for_ranges(Index begin, Index end,
                         const std::function<void(Index, Index)>& body);

// splitmix64, used to derive stream seeds from a user seed.
std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** with Box-Muller normals. Deterministic across platforms,
/// cheap to seed per work item.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next_u64();
  Real uniform();               // [0, 1)
  Real normal();                // standard normal
 private:
  std::uint64_t s_[4];
  bool have_cached_ = false;
  Real cached_ = 0.0;
};

std::uint64_t fnv1a64(std::string_view bytes);

inline void require(bool cond, const char* message) {
  if (!cond) throw std::invalid_argument(message);
}

}  // namespace islab
