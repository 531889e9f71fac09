#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include <Eigen/Dense>

namespace qbell {

// Number of worker threads used by the parallel loops below.
// 0 means "use all hardware threads". Results never depend on this value;
// every parallel loop writes to disjoint slots or reduces in a fixed order.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs fn(begin, end) over a partition of [0, n). Chunks are contiguous and
// processed by at most thread_count() workers; serial when n is small.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

// Pairwise (cascade) summation. Deterministic for a fixed input order and
// accurate to ~log2(n) rounding units.
double pairwise_sum(std::span<const double> xs);

// Seeded RNG producing identical streams on every platform. The standard
// distributions are not bit-portable, so uniforms are mapped from raw 64-bit
// draws directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // uniform in [0, 1)
  double uniform();
  // uniform in [lo, hi)
  double uniform(double lo, double hi);

  // uniform on the unit sphere
  Eigen::Vector3d unit_vector3();
  // uniform direction in R^d (d >= 1), unit norm
  Eigen::VectorXd unit_vector(int dim);

 private:
  std::uint64_t state_;
};

}  // namespace qbell
