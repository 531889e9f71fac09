#pragma once

#include <cstdint>
#include <vector>

#include "qbell/tensor.hpp"

namespace qbell {

struct MaxOptions {
  int restarts = 64;
  int max_iters = 500;
  double tol = 1e-10;
  std::uint64_t seed = 12345;
};

struct MaxComponentResult {
  double value = 0.0;
  std::vector<Direction> directions;
  int restarts_used = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

struct PlaneOptResult {
  LocalFrame frame;
  double restricted_sum = 0.0;
  double in_plane_tmax = 0.0;
  int restarts_used = 0;
  std::uint64_t seed = 0;
};

/// Largest correlation-function value over all product direction tuples,
/// found by higher-order power iteration: holding all parties but one fixed,
/// the optimal vector for the free party is the normalized contraction of the
/// tensor with the others, so each update is exact and the objective never
/// decreases. Runs from `restarts` random starts plus every canonical axis
/// tuple (sign-corrected), and keeps the best value; ties break toward the
/// lowest start index so parallel and serial runs agree.
MaxComponentResult max_component(const CorrelationTensor& tensor, const MaxOptions& opts = {});

/// Best orientation of the per-party measurement planes: maximizes the
/// plane-restricted squared sum over local frames, parametrized per party by
/// Z-Y-Z angles. The in-plane sum depends only on each party's plane normal,
/// and with the other parties fixed the optimal normal is the bottom
/// eigenvector of a 3x3 Gram matrix, so the search alternates exact per-party
/// updates from random restarts until a full pass improves by less than tol.
/// Also reports the largest in-plane component of the rotated tensor (power
/// iteration restricted to 2-vectors).
PlaneOptResult best_plane(const CorrelationTensor& tensor, const MaxOptions& opts = {});

namespace detail {

// Power iteration over a dense side-d tensor (d = 3 full sphere, d = 2 in
// plane). Exposed for the in-plane subproblem and for tests.
struct HopmRun {
  double value = 0.0;
  std::vector<Eigen::VectorXd> vectors;
  bool converged = false;
  int sweeps = 0;
};

HopmRun hopm_single(const std::vector<double>& values, int num_parties, int dim,
                    std::vector<Eigen::VectorXd> start, int max_iters, double tol);

}  // namespace detail

}  // namespace qbell
