#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "oracles.hpp"
#include "qbell/sphereint.hpp"

using namespace qbell;

namespace {

double integrate(const QuadratureRule& rule,
                 const std::function<double(const Eigen::Vector3d&)>& f) {
  const auto& nodes = rule.nodes();
  const auto& carts = rule.cartesian();
  // pairwise: a naive running sum loses ~1e-9 over the dense grids
  std::vector<double> terms(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = nodes[i].weight * f(carts[i]);
  return pairwise_sum(terms);
}

}  // namespace

TEST_CASE("sphere quadrature integrates low-degree polynomials exactly") {
  CHECK(integrate(sphere_quadrature(0), [](const Eigen::Vector3d&) { return 1.0; }) ==
        doctest::Approx(4 * M_PI).epsilon(1e-14));

  const QuadratureRule deg2 = sphere_quadrature(2);
  CHECK(deg2.exact_degree() == 2);
  CHECK(integrate(deg2, [](const Eigen::Vector3d& n) { return n.z() * n.z(); }) ==
        doctest::Approx(4 * M_PI / 3).epsilon(1e-13));
  CHECK(integrate(deg2, [](const Eigen::Vector3d& n) { return n.x() * n.y(); }) ==
        doctest::Approx(0.0));
  CHECK(integrate(deg2, [](const Eigen::Vector3d& n) { return n.x(); }) ==
        doctest::Approx(0.0));

  const QuadratureRule deg4 = sphere_quadrature(4);
  CHECK(integrate(deg4, [](const Eigen::Vector3d& n) { return std::pow(n.z(), 4); }) ==
        doctest::Approx(4 * M_PI / 5).epsilon(1e-13));
  CHECK(integrate(deg4, [](const Eigen::Vector3d& n) {
          return n.x() * n.x() * n.y() * n.y();
        }) == doctest::Approx(4 * M_PI / 15).epsilon(1e-13));

  CHECK(sphere_quadrature(5).nodes().size() == 3 * 6);  // ceil(6/2) x (5+1)
  CHECK_THROWS_AS(sphere_quadrature(-1), std::invalid_argument);
}

TEST_CASE("dense midpoint grid: full weight and an exact kink integral") {
  const QuadratureRule grid = dense_midpoint_grid(400, 800);
  CHECK(grid.nodes().size() == 400u * 800u);
  CHECK(integrate(grid, [](const Eigen::Vector3d&) { return 1.0; }) ==
        doctest::Approx(4 * M_PI).epsilon(1e-12));
  // |z| is linear on each half, and no cell straddles the equator
  CHECK(integrate(grid, [](const Eigen::Vector3d& n) { return std::abs(n.z()); }) ==
        doctest::Approx(2 * M_PI).epsilon(1e-12));
  CHECK_THROWS_AS(dense_midpoint_grid(0, 10), std::invalid_argument);
}

TEST_CASE("quadrature rule constructor rejects malformed nodes") {
  CHECK_THROWS_AS(QuadratureRule({}, 0), std::invalid_argument);
  CHECK_THROWS_AS(QuadratureRule({{0.5, 0.5, -1.0}}, 0), std::invalid_argument);
  CHECK_THROWS_AS(QuadratureRule({{4.0, 0.5, 1.0}}, 0), std::invalid_argument);
}

TEST_CASE("response functions return exactly +-1 with the documented conventions") {
  const ResponseFunction sz = ResponseFunction::sign_of_dot(Eigen::Vector3d::UnitZ());
  CHECK(sz(Eigen::Vector3d(0, 0, 1)) == 1.0);
  CHECK(sz(Eigen::Vector3d(0, 0, -1)) == -1.0);
  CHECK(sz(Eigen::Vector3d(1, 0, 0)) == 1.0);  // sign(0) := +1
  CHECK_FALSE(sz.descriptor().empty());

  CHECK(ResponseFunction::constant(-1)(Eigen::Vector3d(0, 0, 1)) == -1.0);
  CHECK_THROWS_AS(ResponseFunction::constant(2), std::invalid_argument);
  CHECK_THROWS_AS(ResponseFunction::sign_of_dot(Eigen::Vector3d::Zero()), std::invalid_argument);

  const ResponseFunction caps = ResponseFunction::two_caps(
      Eigen::Vector3d::UnitZ(), 0.5, -Eigen::Vector3d::UnitZ(), 0.3);
  CHECK(caps(Eigen::Vector3d(0, 0, 1)) == 1.0);             // inside cap 1
  CHECK(caps(Eigen::Vector3d(0, 0, -1)) == 1.0);            // inside cap 2
  CHECK(caps(Eigen::Vector3d(1, 0, 0)) == -1.0);            // outside both
  CHECK_THROWS_AS(ResponseFunction::two_caps(Eigen::Vector3d::UnitZ(), -0.1,
                                             Eigen::Vector3d::UnitX(), 0.5),
                  std::invalid_argument);

  const Direction d(0.0, 0.0);
  CHECK(sz(d) == 1.0);
}

TEST_CASE("inner_product_EE reproduces the tensor-sum identity") {
  Rng rng(1618);
  for (int n : {2, 3}) {
    for (int rep = 0; rep < 3; ++rep) {
      const CorrelationTensor t = testing::random_tensor(rng, n);
      const double expected = std::pow(4 * M_PI / 3, n) * t.frobenius_sq();
      CHECK(inner_product_EE(t) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("projection of sign responses: bound, saturation, and angles") {
  const QuadratureRule grid = dense_midpoint_grid(400, 800);
  const double bound = std::sqrt(3 * M_PI);

  const ProjectionResult sat =
      project_response(ResponseFunction::sign_of_dot(Eigen::Vector3d::UnitZ()), grid);
  CHECK(sat.norm == doctest::Approx(bound).epsilon(1e-3));
  CHECK(sat.beta == doctest::Approx(0.0));

  const ProjectionResult xr =
      project_response(ResponseFunction::sign_of_dot(Eigen::Vector3d::UnitX()), grid);
  CHECK(xr.norm == doctest::Approx(bound).epsilon(1e-3));
  CHECK(xr.beta == doctest::Approx(M_PI / 2).epsilon(1e-3));
  CHECK(std::min(xr.gamma, 2 * M_PI - xr.gamma) <= 1e-3);  // 0 modulo the phi period

  Rng rng(55);
  for (int rep = 0; rep < 10; ++rep) {
    const ProjectionResult p =
        project_response(ResponseFunction::sign_of_dot(rng.unit_vector3()), grid);
    CHECK(p.norm <= bound + 1e-3);
  }

  // a constant assignment has no overlap with the linear basis functions
  const ProjectionResult flat = project_response(ResponseFunction::constant(1), grid);
  CHECK(flat.norm < 1e-12);
  CHECK(flat.beta == 0.0);
  CHECK(flat.gamma == 0.0);
}

TEST_CASE("lhv_correlation multiplies the parties' assignments") {
  const std::vector<ResponseFunction> rs{ResponseFunction::sign_of_dot(Eigen::Vector3d::UnitZ()),
                                         ResponseFunction::constant(-1)};
  const std::vector<Direction> ds{Direction(0.0, 0.0), Direction(1.0, 1.0)};
  CHECK(lhv_correlation(rs, ds) == -1.0);

  const std::vector<Direction> wrong{Direction(0.0, 0.0)};
  CHECK_THROWS_AS(lhv_correlation(rs, wrong), std::invalid_argument);
}

TEST_CASE("LHV scalar product bound: saturation at the two-qubit GHZ state") {
  const CorrelationTensor t = correlation_tensor(DensityMatrix::from_ket(build_ghz(2, false)));
  const QuadratureRule grid = dense_midpoint_grid(400, 800);
  const std::vector<ResponseFunction> both_sign_z(
      2, ResponseFunction::sign_of_dot(Eigen::Vector3d::UnitZ()));

  const LhvBoundResult r = verify_lhv_bound(both_sign_z, t, grid, MaxOptions{});
  // each party's moment integral is (0, 0, 2*pi), and T_zz = 1
  CHECK(r.lhs == doctest::Approx(4 * M_PI * M_PI).epsilon(1e-9));
  CHECK(r.rhs == doctest::Approx(4 * M_PI * M_PI).epsilon(1e-6));
  CHECK(r.lhs <= r.rhs + 1e-6);
}

TEST_CASE("LHV bound holds over random response tuples and matches a double-grid oracle") {
  Rng rng(7137);
  const CorrelationTensor t = testing::random_tensor(rng, 2);
  const QuadratureRule grid = dense_midpoint_grid(400, 800);
  const double t_max = max_component(t).value;

  for (int rep = 0; rep < 10; ++rep) {
    const std::vector<ResponseFunction> tuple{
        ResponseFunction::sign_of_dot(rng.unit_vector3()),
        ResponseFunction::two_caps(rng.unit_vector3(), rng.uniform(0, M_PI),
                                   rng.unit_vector3(), rng.uniform(0, M_PI))};
    const LhvBoundResult r = verify_lhv_bound(tuple, t, grid, t_max);
    CHECK(r.lhs <= r.rhs + 1e-6);
    if (rep == 0) {
      // On the identical grid the separated evaluation and the literal double
      // quadrature are the same sum reassociated, so they must agree to
      // rounding; this isolates the separation logic from grid accuracy.
      const QuadratureRule coarse = dense_midpoint_grid(40, 80);
      const LhvBoundResult rc = verify_lhv_bound(tuple, t, coarse, t_max);
      const double brute = testing::oracle_lhv_lhs_2q(tuple[0], tuple[1], t, 40, 80);
      CHECK(rc.lhs == doctest::Approx(brute).epsilon(1e-9));
    }
  }

  const std::vector<ResponseFunction> wrong{ResponseFunction::constant(1)};
  CHECK_THROWS_AS(verify_lhv_bound(wrong, t, grid, t_max), std::invalid_argument);
}

TEST_CASE("Monte Carlo inner product agrees with quadrature within its error bars") {
  const CorrelationTensor t = correlation_tensor(DensityMatrix::from_ket(build_ghz(2, false)));
  const double exact = std::pow(4 * M_PI / 3, 2) * t.frobenius_sq();
  const McEstimate mc = mc_inner_product_EE(t, 200000, 2025);
  CHECK(mc.samples == 200000);
  CHECK(mc.std_error > 0.0);
  CHECK(std::abs(mc.value - exact) <= 6.0 * mc.std_error);
  CHECK(mc.std_error < 0.05 * exact);

  const McEstimate again = mc_inner_product_EE(t, 200000, 2025);
  CHECK(again.value == mc.value);  // bit-identical for a fixed seed

  CHECK_THROWS_AS(mc_inner_product_EE(t, 0, 1), std::invalid_argument);
}
