#include "qbell/maximize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qbell/util.hpp"

namespace qbell {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void require_finite(const CorrelationTensor& t) {
  for (double v : t.values())
    if (!std::isfinite(v)) throw std::runtime_error("tensor contains NaN/Inf");
}

// T'_j = sum_i T_i M(i, j) along mode p of a side-d tensor.
void mode_multiply(std::vector<double>& vals, std::vector<double>& scratch, int n, int d, int p,
                   const Eigen::MatrixXd& m) {
  const std::size_t stride = ipow(d, n - 1 - p);
  scratch.resize(vals.size());
  for (std::size_t outer = 0; outer < vals.size(); outer += d * stride) {
    for (std::size_t s = 0; s < stride; ++s) {
      for (int j = 0; j < d; ++j) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i)
          acc += m(i, j) * vals[outer + s + static_cast<std::size_t>(i) * stride];
        scratch[outer + s + static_cast<std::size_t>(j) * stride] = acc;
      }
    }
  }
  vals.swap(scratch);
}

// Contraction of all parties but p with their vectors; the gradient of the
// multilinear objective in party p.
Eigen::VectorXd contract_except(const std::vector<double>& vals, int n, int d,
                                const std::vector<Eigen::VectorXd>& vecs, int p) {
  std::vector<double> cur = vals;
  // parties after p: contiguous folds
  for (int q = n - 1; q > p; --q) {
    const auto& c = vecs[q];
    const std::size_t reduced = cur.size() / d;
    for (std::size_t m = 0; m < reduced; ++m) {
      double acc = 0.0;
      for (int i = 0; i < d; ++i) acc += cur[d * m + static_cast<std::size_t>(i)] * c[i];
      cur[m] = acc;
    }
    cur.resize(reduced);
  }
  // parties before p: strided front folds (in place; index m only reads >= m)
  for (int q = 0; q < p; ++q) {
    const auto& c = vecs[q];
    const std::size_t reduced = cur.size() / d;
    for (std::size_t m = 0; m < reduced; ++m) {
      double acc = 0.0;
      for (int i = 0; i < d; ++i) acc += cur[static_cast<std::size_t>(i) * reduced + m] * c[i];
      cur[m] = acc;
    }
    cur.resize(reduced);
  }
  Eigen::VectorXd g(d);
  for (int i = 0; i < d; ++i) g[i] = cur[static_cast<std::size_t>(i)];
  return g;
}

double contract_all(const std::vector<double>& vals, int n, int d,
                    const std::vector<Eigen::VectorXd>& vecs) {
  const Eigen::VectorXd g = contract_except(vals, n, d, vecs, n - 1);
  return g.dot(vecs[n - 1]);
}

}  // namespace

namespace detail {

HopmRun hopm_single(const std::vector<double>& values, int num_parties, int dim,
                    std::vector<Eigen::VectorXd> start, int max_iters, double tol) {
  const int n = num_parties;
  for (auto& v : start) {
    const double norm = v.norm();
    if (norm <= 0.0 || !std::isfinite(norm))
      throw std::invalid_argument("start vectors must be nonzero");
    v /= norm;
  }
  HopmRun run;
  run.vectors = std::move(start);
  double prev = contract_all(values, n, dim, run.vectors);
  for (int it = 0; it < max_iters; ++it) {
    for (int p = 0; p < n; ++p) {
      Eigen::VectorXd g = contract_except(values, n, dim, run.vectors, p);
      if (!g.allFinite()) throw std::runtime_error("NaN in tensor contraction");
      const double ng = g.norm();
      if (ng < 1e-300) continue;  // flat direction; keep the current vector
      run.vectors[p] = g / ng;
    }
    const double obj = contract_all(values, n, dim, run.vectors);
    // Each per-party update is an exact maximization, so a decrease can only
    // come from a bug.
    if (obj < prev - 1e-12) throw std::logic_error("power-iteration objective decreased");
    run.sweeps = it + 1;
    if (std::abs(obj - prev) < tol) {
      run.value = obj;
      run.converged = true;
      return run;
    }
    prev = obj;
  }
  run.value = prev;
  run.converged = false;
  return run;
}

}  // namespace detail

namespace {

struct StartSet {
  std::vector<std::vector<Eigen::VectorXd>> starts;
};

// Canonical axis tuples (sign-corrected toward +|T|) followed by seeded
// random tuples.
StartSet build_starts(const std::vector<double>& vals, int n, int d, int restarts,
                      std::uint64_t seed) {
  StartSet set;
  std::vector<std::size_t> order(vals.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t canonical_cap = 2187;
  if (vals.size() > canonical_cap) {
    const std::size_t keep = std::min<std::size_t>(vals.size(), 3 * static_cast<std::size_t>(restarts));
    std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                      [&](std::size_t a, std::size_t b) { return std::abs(vals[a]) > std::abs(vals[b]); });
    order.resize(keep);
  }
  for (std::size_t flat : order) {
    std::vector<Eigen::VectorXd> tuple(n, Eigen::VectorXd::Zero(d));
    std::size_t rem = flat;
    for (int q = n - 1; q >= 0; --q) {
      tuple[q][static_cast<int>(rem % d)] = 1.0;
      rem /= d;
    }
    if (vals[flat] < 0.0) tuple[0] = -tuple[0];
    set.starts.push_back(std::move(tuple));
  }
  Rng rng(seed);
  for (int r = 0; r < restarts; ++r) {
    std::vector<Eigen::VectorXd> tuple;
    tuple.reserve(n);
    for (int q = 0; q < n; ++q) tuple.push_back(rng.unit_vector(d));
    set.starts.push_back(std::move(tuple));
  }
  return set;
}

// Runs power iteration from every start and keeps the best value; ties break
// toward the lowest start index so parallel and serial runs agree.
detail::HopmRun best_hopm(const std::vector<double>& vals, int n, int d, const MaxOptions& opts,
                          int* starts_used) {
  StartSet set = build_starts(vals, n, d, opts.restarts, opts.seed);
  std::vector<detail::HopmRun> runs(set.starts.size());
  parallel_for(set.starts.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      runs[i] = detail::hopm_single(vals, n, d, set.starts[i], opts.max_iters, opts.tol);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (runs[i].value > runs[best].value) best = i;
  if (starts_used) *starts_used = static_cast<int>(runs.size());
  return runs[best];
}

}  // namespace

MaxComponentResult max_component(const CorrelationTensor& tensor, const MaxOptions& opts) {
  if (opts.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  require_finite(tensor);

  const int n = tensor.num_parties();
  MaxComponentResult res;
  res.seed = opts.seed;
  detail::HopmRun run = best_hopm(tensor.values(), n, 3, opts, &res.restarts_used);
  res.value = run.value;
  res.converged = run.converged;
  res.directions.reserve(n);
  for (const auto& v : run.vectors) {
    Eigen::Vector3d u = v;
    res.directions.push_back(Direction::from_unit_vector(u.normalized()));
  }
  return res;
}

namespace {

// Sum of squared in-plane components as a function of the parties' plane
// normals: applying the projector Id - n_p n_p^T on every mode and taking the
// squared Frobenius norm.
double plane_objective(const std::vector<double>& tvals, std::vector<double>& work,
                       std::vector<double>& scratch, int n,
                       const std::vector<Eigen::Vector3d>& normals) {
  work = tvals;
  for (int p = 0; p < n; ++p) {
    const Eigen::Matrix3d proj =
        Eigen::Matrix3d::Identity() - normals[p] * normals[p].transpose();
    mode_multiply(work, scratch, n, 3, p, proj);
  }
  double s = 0.0;
  for (double v : work) s += v * v;
  return s;
}

// 3x3 Gram matrix of the tensor along mode p: G_ab = sum over the remaining
// indices of T[..a..] T[..b..].
Eigen::Matrix3d mode_gram(const std::vector<double>& vals, int n, int p) {
  const std::size_t stride = ipow(3, n - 1 - p);
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  for (std::size_t outer = 0; outer < vals.size(); outer += 3 * stride) {
    for (std::size_t s = 0; s < stride; ++s) {
      const double v0 = vals[outer + s];
      const double v1 = vals[outer + s + stride];
      const double v2 = vals[outer + s + 2 * stride];
      g(0, 0) += v0 * v0;
      g(1, 1) += v1 * v1;
      g(2, 2) += v2 * v2;
      g(0, 1) += v0 * v1;
      g(0, 2) += v0 * v2;
      g(1, 2) += v1 * v2;
    }
  }
  g(1, 0) = g(0, 1);
  g(2, 0) = g(0, 2);
  g(2, 1) = g(1, 2);
  return g;
}

struct PlaneRun {
  double objective = 0.0;
  std::vector<Eigen::Vector3d> normals;
};

// Alternating exact updates: with the other parties' projectors applied, the
// in-plane sum is tr(G) - n^T G n, maximized by the bottom eigenvector of G.
PlaneRun plane_descent(const std::vector<double>& tvals, int n,
                       std::vector<Eigen::Vector3d> normals, int max_iters, double tol) {
  std::vector<double> work, scratch, partial;
  PlaneRun run;
  run.normals = std::move(normals);
  double prev = plane_objective(tvals, work, scratch, n, run.normals);
  for (int it = 0; it < max_iters; ++it) {
    for (int p = 0; p < n; ++p) {
      partial = tvals;
      for (int k = 0; k < n; ++k) {
        if (k == p) continue;
        const Eigen::Matrix3d proj =
            Eigen::Matrix3d::Identity() - run.normals[k] * run.normals[k].transpose();
        mode_multiply(partial, scratch, n, 3, k, proj);
      }
      const Eigen::Matrix3d gram = mode_gram(partial, n, p);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(gram);
      run.normals[p] = es.eigenvectors().col(0);  // smallest eigenvalue
    }
    const double obj = plane_objective(tvals, work, scratch, n, run.normals);
    if (obj < prev - 1e-12) throw std::logic_error("plane-search objective decreased");
    if (std::abs(obj - prev) < tol) {
      run.objective = obj;
      return run;
    }
    prev = obj;
  }
  run.objective = prev;
  return run;
}

LocalFrame frame_from_normals(const std::vector<Eigen::Vector3d>& normals) {
  std::vector<Eigen::Vector3d> angles;
  angles.reserve(normals.size());
  for (const auto& n : normals) {
    const double beta = std::acos(std::clamp(n.z(), -1.0, 1.0));
    const double alpha = (n.head<2>().norm() < 1e-14) ? 0.0 : std::atan2(n.y(), n.x());
    angles.emplace_back(alpha, beta, 0.0);
  }
  return LocalFrame::from_euler(angles);
}

// Entries of the rotated tensor with both axes per party restricted to the
// plane: the 2^N subtensor feeding the in-plane power iteration.
std::vector<double> in_plane_subtensor(const CorrelationTensor& rotated) {
  const int n = rotated.num_parties();
  const std::size_t count = std::size_t{1} << n;
  std::vector<double> sub(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    std::size_t flat = 0;
    for (int q = 0; q < n; ++q) flat = flat * 3 + ((mask >> (n - 1 - q)) & 1u);
    sub[mask] = rotated[flat];
  }
  return sub;
}

}  // namespace

PlaneOptResult best_plane(const CorrelationTensor& tensor, const MaxOptions& opts) {
  if (opts.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  require_finite(tensor);

  const int n = tensor.num_parties();
  const auto& tvals = tensor.values();

  std::vector<std::vector<Eigen::Vector3d>> starts;
  starts.emplace_back(n, Eigen::Vector3d::UnitZ());  // identity frame
  starts.emplace_back(n, Eigen::Vector3d::UnitX());
  starts.emplace_back(n, Eigen::Vector3d::UnitY());
  Rng rng(opts.seed);
  for (int r = 0; r < opts.restarts; ++r) {
    std::vector<Eigen::Vector3d> tuple;
    tuple.reserve(n);
    for (int q = 0; q < n; ++q) tuple.push_back(rng.unit_vector3());
    starts.push_back(std::move(tuple));
  }

  std::vector<PlaneRun> runs(starts.size());
  parallel_for(starts.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      runs[i] = plane_descent(tvals, n, starts[i], opts.max_iters, opts.tol);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (runs[i].objective > runs[best].objective) best = i;

  PlaneOptResult res{.frame = frame_from_normals(runs[best].normals),
                     .restricted_sum = 0.0,
                     .in_plane_tmax = 0.0,
                     .restarts_used = static_cast<int>(runs.size()),
                     .seed = opts.seed};
  const CorrelationTensor rotated = rotate(tensor, res.frame);
  res.restricted_sum = restrict_to_plane(rotated);

  MaxOptions sub_opts = opts;
  detail::HopmRun inplane = best_hopm(in_plane_subtensor(rotated), n, 2, sub_opts, nullptr);
  res.in_plane_tmax = inplane.value;
  return res;
}

}  // namespace qbell
