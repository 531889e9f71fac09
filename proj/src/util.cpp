#include "qbell/util.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

namespace qbell {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned n) { g_threads.store(n); }

unsigned thread_count() {
  unsigned n = g_threads.load();
  if (n == 0) {
    n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  const unsigned workers = thread_count();
  if (workers <= 1 || n < 256) {
    fn(0, n);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(workers, n);
  const std::size_t step = (n + chunks - 1) / chunks;
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = c * step;
    const std::size_t end = std::min(n, begin + step);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 32) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// splitmix64; passes through every 64-bit state exactly once.
std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

Eigen::Vector3d Rng::unit_vector3() {
  const double z = uniform(-1.0, 1.0);
  const double phi = uniform(0.0, 2.0 * std::numbers::pi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

Eigen::VectorXd Rng::unit_vector(int dim) {
  Eigen::VectorXd v(dim);
  while (true) {
    // Box-Muller pairs; rejection only on the (measure-zero) zero vector.
    for (int i = 0; i < dim; i += 2) {
      const double u1 = std::max(uniform(), 0x1.0p-60);
      const double u2 = uniform();
      const double r = std::sqrt(-2.0 * std::log(u1));
      v[i] = r * std::cos(2.0 * std::numbers::pi * u2);
      if (i + 1 < dim) v[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

}  // namespace qbell
