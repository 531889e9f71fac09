#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qbell/maximize.hpp"
#include "qbell/tensor.hpp"

namespace qbell {

struct QuadratureNode {
  double theta;
  double phi;
  double weight;
};

/// Product rule on the unit sphere with measure dOmega = sin(theta) dtheta dphi.
/// Weights always sum to 4*pi.
class QuadratureRule {
 public:
  QuadratureRule(std::vector<QuadratureNode> nodes, int exact_degree);

  const std::vector<QuadratureNode>& nodes() const { return nodes_; }
  int exact_degree() const { return exact_degree_; }

  // Cartesian coordinates of every node, in node order.
  const std::vector<Eigen::Vector3d>& cartesian() const { return cartesian_; }

 private:
  std::vector<QuadratureNode> nodes_;
  std::vector<Eigen::Vector3d> cartesian_;
  int exact_degree_;
};

/// Gauss-Legendre in cos(theta) with ceil((degree+1)/2) nodes, uniform
/// trapezoid in phi with degree+1 nodes; exact for spherical polynomials of
/// the given total degree in the Cartesian components.
QuadratureRule sphere_quadrature(int polynomial_degree);

/// Midpoint product grid in (cos theta, phi). Low order but dense; the right
/// tool for discontinuous integrands such as sign responses, where Gauss
/// orders buy nothing.
QuadratureRule dense_midpoint_grid(int n_costheta, int n_phi);

/// Deterministic +-1 assignment on the sphere: one party's predetermined
/// local result as a function of its setting.
class ResponseFunction {
 public:
  ResponseFunction(std::function<double(const Eigen::Vector3d&)> fn, std::string descriptor);

  // sign(axis . n), with sign(0) := +1
  static ResponseFunction sign_of_dot(const Eigen::Vector3d& axis);
  static ResponseFunction constant(int value);
  // +1 inside either spherical cap (axis, angular radius), -1 elsewhere
  static ResponseFunction two_caps(const Eigen::Vector3d& axis1, double radius1,
                                   const Eigen::Vector3d& axis2, double radius2);

  double operator()(const Direction& d) const { return fn_(d.unit_vector()); }
  double operator()(const Eigen::Vector3d& n) const { return fn_(n); }

  const std::string& descriptor() const { return descriptor_; }

 private:
  std::function<double(const Eigen::Vector3d&)> fn_;
  std::string descriptor_;
};

/// Projection of a response onto the three-dimensional function space spanned
/// by sqrt(3/4pi) {sin t cos p, sin t sin p, cos t}: length of the projection
/// plus the spherical angles (beta, gamma) of its direction.
struct ProjectionResult {
  double norm = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// Squared L2 norm of the correlation function over all parties' spheres,
/// computed by honest tensor-product quadrature (degree-2 rule per sphere,
/// exact since the integrand is a product of per-sphere quadratics). Equals
/// (4pi/3)^N sum T^2; the identity is what the test harness checks.
double inner_product_EE(const CorrelationTensor& tensor);

ProjectionResult project_response(const ResponseFunction& response, const QuadratureRule& quadrature);

/// Product of the parties' predetermined results at the given settings.
double lhv_correlation(std::span<const ResponseFunction> responses,
                       std::span<const Direction> directions);

struct LhvBoundResult {
  double lhs = 0.0;  // integral of (prod_j I_j) E over all spheres
  double rhs = 0.0;  // (2pi)^N T_max
};

/// The scalar product of a deterministic local model with the correlation
/// function, against its bound. The integrand separates, so the lhs is the
/// tensor contracted with the per-party 3-vector integrals of I_j(n) n.
LhvBoundResult verify_lhv_bound(std::span<const ResponseFunction> responses,
                                const CorrelationTensor& tensor,
                                const QuadratureRule& quadrature,
                                const MaxOptions& opts = {});

/// Same, with a precomputed unrestricted maximal component (avoids re-running
/// the optimizer inside sweeps over many response tuples).
LhvBoundResult verify_lhv_bound(std::span<const ResponseFunction> responses,
                                const CorrelationTensor& tensor,
                                const QuadratureRule& quadrature,
                                double t_max);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo cross-check of inner_product_EE: uniform sphere sampling per
/// party. Quadrature remains the path of record.
McEstimate mc_inner_product_EE(const CorrelationTensor& tensor, std::size_t samples,
                               std::uint64_t seed);

}  // namespace qbell
