#include "qbell/sphereint.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qbell/util.hpp"

namespace qbell {

namespace {

// Nodes and weights of m-point Gauss-Legendre on [-1, 1] by Newton iteration
// on the Legendre recurrence.
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double deriv = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < m; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * t * p1 - k * p2) / (k + 1.0);
      }
      deriv = m * (t * p0 - p1) / (t * t - 1.0);
      const double step = p0 / deriv;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    x[i] = -t;
    x[m - 1 - i] = t;
    w[i] = w[m - 1 - i] = 2.0 / ((1.0 - t * t) * deriv * deriv);
  }
}

double require_unit_response(double v) {
  if (v != 1.0 && v != -1.0)
    throw std::invalid_argument("response function must return exactly +1 or -1");
  return v;
}

std::string vec_str(const Eigen::Vector3d& v) {
  std::ostringstream os;
  os << "(" << v.x() << "," << v.y() << "," << v.z() << ")";
  return os.str();
}

}  // namespace

QuadratureRule::QuadratureRule(std::vector<QuadratureNode> nodes, int exact_degree)
    : nodes_(std::move(nodes)), exact_degree_(exact_degree) {
  if (nodes_.empty()) throw std::invalid_argument("quadrature rule needs at least one node");
  cartesian_.reserve(nodes_.size());
  for (const auto& n : nodes_) {
    if (!(n.theta >= 0.0 && n.theta <= M_PI) || !std::isfinite(n.phi) ||
        !(n.weight > 0.0 && std::isfinite(n.weight)))
      throw std::invalid_argument("invalid quadrature node");
    const double st = std::sin(n.theta);
    cartesian_.emplace_back(st * std::cos(n.phi), st * std::sin(n.phi), std::cos(n.theta));
  }
}

QuadratureRule sphere_quadrature(int polynomial_degree) {
  if (polynomial_degree < 0) throw std::invalid_argument("degree must be >= 0");
  const int m = (polynomial_degree + 2) / 2;  // ceil((degree+1)/2)
  const int num_phi = polynomial_degree + 1;
  std::vector<double> x, w;
  gauss_legendre(m, x, w);
  std::vector<QuadratureNode> nodes;
  nodes.reserve(static_cast<std::size_t>(m) * num_phi);
  const double wphi = 2.0 * M_PI / num_phi;
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < num_phi; ++k)
      nodes.push_back({std::acos(std::clamp(x[i], -1.0, 1.0)), wphi * k, w[i] * wphi});
  return QuadratureRule(std::move(nodes), polynomial_degree);
}

QuadratureRule dense_midpoint_grid(int n_costheta, int n_phi) {
  if (n_costheta < 1 || n_phi < 1) throw std::invalid_argument("grid sizes must be >= 1");
  const double dct = 2.0 / n_costheta;
  const double dphi = 2.0 * M_PI / n_phi;
  std::vector<QuadratureNode> nodes;
  nodes.reserve(static_cast<std::size_t>(n_costheta) * n_phi);
  for (int i = 0; i < n_costheta; ++i) {
    const double ct = -1.0 + (i + 0.5) * dct;
    const double theta = std::acos(std::clamp(ct, -1.0, 1.0));
    for (int k = 0; k < n_phi; ++k) nodes.push_back({theta, (k + 0.5) * dphi, dct * dphi});
  }
  return QuadratureRule(std::move(nodes), 1);
}

ResponseFunction::ResponseFunction(std::function<double(const Eigen::Vector3d&)> fn,
                                   std::string descriptor)
    : fn_(std::move(fn)), descriptor_(std::move(descriptor)) {
  if (!fn_) throw std::invalid_argument("response function must be callable");
}

ResponseFunction ResponseFunction::sign_of_dot(const Eigen::Vector3d& axis) {
  const double norm = axis.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw std::invalid_argument("axis must be a nonzero vector");
  const Eigen::Vector3d a = axis / norm;
  return ResponseFunction(
      [a](const Eigen::Vector3d& n) { return a.dot(n) >= 0.0 ? 1.0 : -1.0; },
      "sign_of_dot" + vec_str(a));
}

ResponseFunction ResponseFunction::constant(int value) {
  if (value != 1 && value != -1) throw std::invalid_argument("constant response must be +-1");
  const double v = value;
  return ResponseFunction([v](const Eigen::Vector3d&) { return v; },
                          value == 1 ? "constant(+1)" : "constant(-1)");
}

ResponseFunction ResponseFunction::two_caps(const Eigen::Vector3d& axis1, double radius1,
                                            const Eigen::Vector3d& axis2, double radius2) {
  const double n1 = axis1.norm(), n2 = axis2.norm();
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw std::invalid_argument("cap axes must be nonzero");
  if (!(radius1 >= 0.0 && radius1 <= M_PI) || !(radius2 >= 0.0 && radius2 <= M_PI))
    throw std::invalid_argument("cap radii must lie in [0, pi]");
  const Eigen::Vector3d a1 = axis1 / n1, a2 = axis2 / n2;
  const double c1 = std::cos(radius1), c2 = std::cos(radius2);
  std::ostringstream os;
  os << "two_caps" << vec_str(a1) << "@" << radius1 << "," << vec_str(a2) << "@" << radius2;
  return ResponseFunction(
      [a1, a2, c1, c2](const Eigen::Vector3d& n) {
        return (a1.dot(n) >= c1 || a2.dot(n) >= c2) ? 1.0 : -1.0;
      },
      os.str());
}

double inner_product_EE(const CorrelationTensor& tensor) {
  const QuadratureRule rule = sphere_quadrature(2);
  const auto& nodes = rule.nodes();
  const auto& carts = rule.cartesian();
  // Integrate sphere by sphere: fold the last remaining party with each node
  // direction, recurse, and weight. E^2 is quadratic per sphere, so the
  // degree-2 rule is exact and no shortcut through the tensor identity is
  // taken.
  std::function<double(const std::vector<double>&, int)> rec =
      [&](const std::vector<double>& vals, int parties_left) -> double {
    if (parties_left == 0) return vals[0] * vals[0];
    std::vector<double> folded(vals.size() / 3);
    std::vector<double> terms(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Eigen::Vector3d& c = carts[i];
      for (std::size_t m = 0; m < folded.size(); ++m)
        folded[m] =
            vals[3 * m] * c.x() + vals[3 * m + 1] * c.y() + vals[3 * m + 2] * c.z();
      terms[i] = nodes[i].weight * rec(folded, parties_left - 1);
    }
    return pairwise_sum(terms);
  };
  return rec(tensor.values(), tensor.num_parties());
}

ProjectionResult project_response(const ResponseFunction& response,
                                  const QuadratureRule& quadrature) {
  const auto& nodes = quadrature.nodes();
  const auto& carts = quadrature.cartesian();
  const double scale = std::sqrt(3.0 / (4.0 * M_PI));
  std::vector<double> bx(nodes.size()), by(nodes.size()), bz(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double v = require_unit_response(response(carts[i]));
    const double wv = nodes[i].weight * v * scale;
    bx[i] = wv * carts[i].x();
    by[i] = wv * carts[i].y();
    bz[i] = wv * carts[i].z();
  }
  const Eigen::Vector3d p(pairwise_sum(bx), pairwise_sum(by), pairwise_sum(bz));
  ProjectionResult res;
  res.norm = p.norm();
  if (res.norm > 1e-13) {
    res.beta = std::acos(std::clamp(p.z() / res.norm, -1.0, 1.0));
    if (p.head<2>().norm() > 1e-13) {
      res.gamma = std::atan2(p.y(), p.x());
      if (res.gamma < 0.0) res.gamma += 2.0 * M_PI;
    }
  }
  return res;
}

double lhv_correlation(std::span<const ResponseFunction> responses,
                       std::span<const Direction> directions) {
  if (responses.size() != directions.size())
    throw std::invalid_argument("one response per party required");
  if (responses.empty()) throw std::invalid_argument("at least one party required");
  double prod = 1.0;
  for (std::size_t j = 0; j < responses.size(); ++j)
    prod *= require_unit_response(responses[j](directions[j]));
  return prod;
}

LhvBoundResult verify_lhv_bound(std::span<const ResponseFunction> responses,
                                const CorrelationTensor& tensor,
                                const QuadratureRule& quadrature, double t_max) {
  const int n = tensor.num_parties();
  if (static_cast<int>(responses.size()) != n)
    throw std::invalid_argument("one response per party required");
  const auto& nodes = quadrature.nodes();
  const auto& carts = quadrature.cartesian();
  // The integrand separates: contract the tensor with each party's vector
  // integral of I_j(n) n.
  std::vector<Eigen::Vector3d> moments;
  moments.reserve(n);
  std::vector<double> bx(nodes.size()), by(nodes.size()), bz(nodes.size());
  for (int j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double wv = nodes[i].weight * require_unit_response(responses[j](carts[i]));
      bx[i] = wv * carts[i].x();
      by[i] = wv * carts[i].y();
      bz[i] = wv * carts[i].z();
    }
    moments.emplace_back(pairwise_sum(bx), pairwise_sum(by), pairwise_sum(bz));
  }
  return LhvBoundResult{.lhs = contract(tensor, moments),
                        .rhs = std::pow(2.0 * M_PI, n) * t_max};
}

LhvBoundResult verify_lhv_bound(std::span<const ResponseFunction> responses,
                                const CorrelationTensor& tensor,
                                const QuadratureRule& quadrature, const MaxOptions& opts) {
  return verify_lhv_bound(responses, tensor, quadrature, max_component(tensor, opts).value);
}

McEstimate mc_inner_product_EE(const CorrelationTensor& tensor, std::size_t samples,
                               std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("samples must be >= 1");
  const int n = tensor.num_parties();
  Rng rng(seed);
  std::vector<double> e2(samples);
  std::vector<Eigen::Vector3d> dirs(n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (int p = 0; p < n; ++p) dirs[p] = rng.unit_vector3();
    const double e = contract(tensor, dirs);
    e2[s] = e * e;
  }
  const double mean = pairwise_sum(e2) / static_cast<double>(samples);
  double var = 0.0;
  if (samples > 1) {
    for (double v : e2) var += (v - mean) * (v - mean);
    var /= static_cast<double>(samples - 1);
  }
  const double scale = std::pow(4.0 * M_PI, n);
  return McEstimate{.value = scale * mean,
                    .std_error = scale * std::sqrt(var / static_cast<double>(samples)),
                    .samples = samples};
}

}  // namespace qbell
