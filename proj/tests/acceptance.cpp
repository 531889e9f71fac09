// Release gates for the library and CLI. Each gate prints one [PASS]/[FAIL]
// line with the measured numbers and its wall time; the exit code is the
// number of failed gates. Budgets are part of the gate: a slow pass fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "qbell/cli.hpp"
#include "qbell/maximize.hpp"
#include "qbell/qcore.hpp"
#include "qbell/sphereint.hpp"
#include "qbell/tensor.hpp"
#include "qbell/util.hpp"

namespace {

using namespace qbell;

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

// 1. The mixture tensor has exactly 93 entries of magnitude f/3 and 636 nulls,
// and every nonzero index multiset is either all one axis or two of one axis
// with four of another.
bool gate_tensor_structure(std::string& detail) {
  bool ok = true;
  std::ostringstream os;
  for (double f : {0.3, 0.9}) {
    const CorrelationTensor t = correlation_tensor(ghz_noise_mixture(f));
    std::size_t at_f3 = 0, nulls = 0, bad_pattern = 0;
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      if (std::abs(t[flat]) < 1e-10) {
        ++nulls;
        continue;
      }
      if (std::abs(std::abs(t[flat]) - f / 3.0) <= 1e-10) ++at_f3;
      int counts[3] = {0, 0, 0};
      for (std::size_t rem = flat, q = 0; q < 6; ++q, rem /= 3) ++counts[rem % 3];
      const int distinct = (counts[0] > 0) + (counts[1] > 0) + (counts[2] > 0);
      const int top = std::max({counts[0], counts[1], counts[2]});
      if (!(distinct == 1 || (distinct == 2 && top == 4))) ++bad_pattern;
    }
    if (at_f3 != 93 || nulls != 636 || bad_pattern != 0) ok = false;
    os << "f=" << f << ": " << at_f3 << " at f/3, " << nulls << " null, " << bad_pattern
       << " off-pattern;  ";
  }
  detail = os.str() + "expected 93 / 636 / 0";
  return ok;
}

// 2. The unrestricted maximal component of the mixture tensor against the
// published f/3, with 64 restarts.
bool gate_max_component(std::string& detail) {
  MaxOptions opts;
  opts.restarts = 64;
  bool ok = true;
  std::ostringstream os;
  os << "measured";
  for (double f : {0.3, 0.6, 1.0}) {
    const MaxComponentResult r = max_component(correlation_tensor(ghz_noise_mixture(f)), opts);
    if (std::abs(r.value - f / 3.0) > 1e-6) ok = false;
    os << "  " << fmt(r.value, 9) << " (f=" << f << ", target " << fmt(f / 3.0, 9) << ")";
  }
  detail = os.str() + ";  tolerance 1e-6";
  return ok;
}

double threshold_from_cli(const std::string& criterion) {
  std::ostringstream out, err;
  const std::vector<std::string> args{"threshold", "--criterion", criterion, "--format", "json"};
  if (cli::run(args, out, err) != cli::kExitOk)
    throw std::runtime_error("threshold subcommand failed for " + criterion + ": " + err.str());
  return nlohmann::json::parse(out.str()).at("threshold").at("critical_f").get<double>();
}

// 3. The CLI threshold subcommand against the published critical visibilities,
// plus the published strict ordering.
bool gate_thresholds(std::string& detail) {
  const double ts = threshold_from_cli("two_setting");
  const double pl = threshold_from_cli("plane");
  const double fs = threshold_from_cli("full_sphere");
  const bool values_ok = std::abs(ts - 0.53033) <= 1e-4 && std::abs(pl - 0.399422) <= 1e-4 &&
                         std::abs(fs - 0.36744) <= 1e-4;
  const bool order_ok = fs < pl && pl < ts;
  detail = "measured two_setting " + fmt(ts, 9) + ", plane " + fmt(pl, 9) + ", full_sphere " +
           fmt(fs, 9) + " vs published 0.53033 / 0.399422 / 0.36744 (tol 1e-4); ordering " +
           (order_ok ? "holds" : "violated");
  return values_ok && order_ok;
}

// 4. Quadrature norm of the correlation function against (4 pi / 3)^N sum T^2.
bool gate_norm_identity(std::string& detail) {
  double worst = 0.0;
  for (int n : {2, 3, 6}) {
    const CorrelationTensor t =
        correlation_tensor(DensityMatrix::from_ket(build_ghz(n, n == 6)));
    const double lhs = inner_product_EE(t);
    const double rhs = std::pow(4.0 * M_PI / 3.0, n) * t.frobenius_sq();
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  detail = "worst relative residual " + fmt(worst, 3) + " over N = 2, 3, 6;  tolerance 1e-7";
  return worst < 1e-7;
}

// 5. Projection of deterministic responses onto the degree-one spherical
// harmonics never exceeds sqrt(3 pi), and sign(cos theta) saturates it.
bool gate_projection_bound(std::string& detail) {
  const QuadratureRule grid = dense_midpoint_grid(800, 1600);
  Rng rng(20240817);
  std::vector<ResponseFunction> responses;
  responses.reserve(200);
  for (int i = 0; i < 200; ++i)
    responses.push_back(ResponseFunction::sign_of_dot(rng.unit_vector3()));
  std::vector<double> norms(responses.size());
  parallel_for(responses.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      norms[i] = project_response(responses[i], grid).norm;
  });
  double worst = 0.0;
  for (double n : norms) worst = std::max(worst, n);
  const double bound = std::sqrt(3.0 * M_PI);
  const double saturation =
      project_response(ResponseFunction::sign_of_dot(Eigen::Vector3d::UnitZ()), grid).norm;
  detail = "largest norm " + fmt(worst, 9) + " of 200 sign responses vs bound " + fmt(bound, 9) +
           "; sign(cos theta) reaches " + fmt(saturation, 9) + ";  tolerance 1e-3";
  return worst <= bound + 1e-3 && std::abs(saturation - bound) <= 1e-3;
}

ResponseFunction random_response(Rng& rng) {
  const double kind = rng.uniform();
  if (kind < 0.6) return ResponseFunction::sign_of_dot(rng.unit_vector3());
  if (kind < 0.9) {
    const Eigen::Vector3d a1 = rng.unit_vector3();
    const Eigen::Vector3d a2 = rng.unit_vector3();
    return ResponseFunction::two_caps(a1, rng.uniform(0.3, 1.5), a2, rng.uniform(0.2, 1.2));
  }
  return ResponseFunction::constant(rng.uniform() < 0.5 ? 1 : -1);
}

// 6. The LHV scalar product against its (2 pi)^N T_max bound on the f = 1
// mixture tensor, over 100 random deterministic response tuples.
bool gate_lhv_bound(std::string& detail) {
  const CorrelationTensor t = correlation_tensor(ghz_noise_mixture(1.0));
  MaxOptions opts;
  opts.restarts = 64;
  const double t_max = max_component(t, opts).value;
  const QuadratureRule grid = dense_midpoint_grid(400, 800);
  Rng rng(430031);
  std::vector<std::vector<ResponseFunction>> tuples;
  tuples.reserve(100);
  for (int k = 0; k < 100; ++k) {
    std::vector<ResponseFunction> tuple;
    tuple.reserve(6);
    for (int j = 0; j < 6; ++j) tuple.push_back(random_response(rng));
    tuples.push_back(std::move(tuple));
  }
  std::vector<double> lhs(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      lhs[i] = verify_lhv_bound(tuples[i], t, grid, t_max).lhs;
  });
  double worst = lhs[0];
  for (double v : lhs) worst = std::max(worst, v);
  const double rhs = std::pow(2.0 * M_PI, 6) * t_max;
  detail = "largest lhs " + fmt(worst, 9) + " vs (2 pi)^6 T_max = " + fmt(rhs, 9) +
           " over 100 tuples;  slack 1e-6";
  return worst <= rhs + 1e-6;
}

// 7. The optimizers against exhaustive grid searches on random two-qubit
// states (1 degree for the maximal component, 3 degrees for the plane).
bool gate_two_qubit_oracles(std::string& detail) {
  Rng rng(7701);
  MaxOptions opts;
  opts.restarts = 64;
  double worst_max = 0.0, worst_plane = 0.0;
  for (int k = 0; k < 10; ++k) {
    const CorrelationTensor t = correlation_tensor(testing::random_state(rng, 2));
    worst_max = std::max(
        worst_max, std::abs(max_component(t, opts).value - testing::oracle_max_component_2q(t)));
    worst_plane = std::max(worst_plane, std::abs(best_plane(t, opts).restricted_sum -
                                                 testing::oracle_best_plane_2q(t)));
  }
  detail = "worst |library - oracle|: maximal component " + fmt(worst_max, 3) + ", plane sum " +
           fmt(worst_plane, 3) + " over 10 random states;  tolerance 2e-4";
  return worst_max <= 2e-4 && worst_plane <= 2e-4;
}

// 8. Structural properties: Frobenius invariance under local frames,
// linearity in the state, the cyclic-rotation adjoint relation, and sweep
// monotonicity of the power iteration (which throws on any decrease).
bool gate_properties(std::string& detail) {
  Rng rng(991);
  const CorrelationTensor t6 = correlation_tensor(ghz_noise_mixture(0.8));
  double worst_frob = 0.0;
  for (int k = 0; k < 100; ++k) {
    std::vector<Eigen::Vector3d> angles(6);
    for (auto& a : angles)
      a = {rng.uniform(0.0, 2.0 * M_PI), std::acos(rng.uniform(-1.0, 1.0)),
           rng.uniform(0.0, 2.0 * M_PI)};
    const CorrelationTensor r = rotate(t6, LocalFrame::from_euler(angles));
    worst_frob = std::max(worst_frob, std::abs(r.frobenius_sq() - t6.frobenius_sq()));
  }

  const DensityMatrix a = ghz_noise_mixture(0.7);
  const DensityMatrix b = DensityMatrix::from_ket(build_ghz(6, true));
  const CorrelationTensor ta = correlation_tensor(a);
  const CorrelationTensor tb = correlation_tensor(b);
  const CorrelationTensor tmix = correlation_tensor(mix(0.37, a, b));
  double worst_lin = 0.0;
  for (std::size_t i = 0; i < tmix.size(); ++i)
    worst_lin = std::max(worst_lin, std::abs(tmix[i] - (0.37 * ta[i] + 0.63 * tb[i])));

  const Ket psi = build_ghz(6, true);
  const LocalUnitary u =
      rotation_unitary(Eigen::Vector3d(1, 1, 1).normalized(), 2.0 * M_PI / 3.0);
  const CorrelationTensor after_u =
      correlation_tensor(DensityMatrix::from_ket(apply_local_unitary(psi, u)));
  Eigen::Matrix3d cycle;
  cycle << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  const CorrelationTensor permuted =
      rotate(correlation_tensor(DensityMatrix::from_ket(psi)),
             LocalFrame(std::vector<Eigen::Matrix3d>(6, cycle)));
  double worst_adj = 0.0;
  for (std::size_t i = 0; i < permuted.size(); ++i)
    worst_adj = std::max(worst_adj, std::abs(permuted[i] - after_u[i]));

  MaxOptions opts;
  opts.restarts = 16;
  bool monotone = true;
  try {
    for (int k = 0; k < 30; ++k) {
      opts.seed = 1000 + k;
      max_component(testing::random_tensor(rng, 2 + k % 3), opts);
    }
    max_component(t6, opts);
  } catch (const std::logic_error&) {
    monotone = false;
  }

  detail = "frobenius drift " + fmt(worst_frob, 3) + " (tol 1e-10), linearity " +
           fmt(worst_lin, 3) + " (tol 1e-12), cyclic adjoint " + fmt(worst_adj, 3) +
           " (tol 1e-10), sweeps " + (monotone ? "monotone" : "NON-MONOTONE");
  return worst_frob <= 1e-10 && worst_lin <= 1e-12 && worst_adj <= 1e-10 && monotone;
}

struct Gate {
  std::string title;
  double budget_s;  // 0 = no stated budget
  std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
  set_thread_count(0);
  const std::vector<Gate> gates = {
      {"tensor structure", 1.0, gate_tensor_structure},
      {"maximal component", 5.0, gate_max_component},
      {"noise thresholds", 60.0, gate_thresholds},
      {"norm identity", 10.0, gate_norm_identity},
      {"projection bound", 30.0, gate_projection_bound},
      {"LHV scalar-product bound", 60.0, gate_lhv_bound},
      {"two-qubit grid oracles", 120.0, gate_two_qubit_oracles},
      {"structural properties", 0.0, gate_properties},
  };
  int failures = 0;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = gates[i].run(detail);
    } catch (const std::exception& ex) {
      detail = std::string("exception: ") + ex.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (gates[i].budget_s > 0.0 && secs > gates[i].budget_s) {
      ok = false;
      detail += " [over the " + fmt(gates[i].budget_s, 3) + " s budget]";
    }
    if (!ok) ++failures;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << (i + 1) << ". " << gates[i].title << ": "
              << detail << "  (" << fmt(secs, 3) << " s)\n";
  }
  std::cout << (gates.size() - failures) << " / " << gates.size() << " criteria passed\n";
  return failures;
}
