#include "qbell/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <stdexcept>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbell/criteria.hpp"
#include "qbell/qcore.hpp"
#include "qbell/sphereint.hpp"
#include "qbell/tensor.hpp"
#include "qbell/util.hpp"
#include "qbell/version.hpp"

namespace qbell::cli {

namespace {

using nlohmann::json;

constexpr double kZeroEntryCutoff = 1e-10;

DensityMatrix build_state(const RunConfig& cfg) {
  if (cfg.state_family == "ghz_mixture") {
    if (cfg.n != 6)
      throw std::invalid_argument("ghz_mixture is a six-qubit family; --n must stay 6");
    return ghz_noise_mixture(cfg.f);
  }
  if (cfg.state_family == "ghz")
    return DensityMatrix::from_ket(build_ghz(cfg.n, cfg.flip_last));
  throw std::invalid_argument("unknown state family: " + cfg.state_family);
}

MaxOptions max_options(const RunConfig& cfg) {
  MaxOptions opts;
  opts.restarts = cfg.restarts;
  opts.tol = cfg.tol;
  opts.seed = cfg.seed;
  return opts;
}

json config_json(const RunConfig& cfg) {
  json state{{"family", cfg.state_family}};
  if (cfg.state_family == "ghz_mixture") {
    state["f"] = cfg.f;
  } else {
    state["n"] = cfg.n;
    state["flip_last"] = cfg.flip_last;
  }
  json j{{"state", std::move(state)}, {"seed", cfg.seed},       {"restarts", cfg.restarts},
         {"tol", cfg.tol},            {"format", cfg.format},   {"threads", cfg.threads}};
  if (cfg.command == "threshold") j["criterion"] = cfg.criterion;
  return j;
}

json envelope(const RunConfig& cfg) {
  return json{{"version", kVersion},
              {"command", cfg.command},
              {"seed", cfg.seed},
              {"config", config_json(cfg)}};
}

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

struct TensorSummary {
  std::size_t nonzero_count = 0;
  double frobenius_sq = 0.0;
  double t_max = 0.0;  // largest |entry|
};

TensorSummary summarize(const CorrelationTensor& t) {
  TensorSummary s;
  for (double v : t.values())
    if (std::abs(v) >= kZeroEntryCutoff) ++s.nonzero_count;
  s.frobenius_sq = t.frobenius_sq();
  s.t_max = t.max_abs_entry();
  return s;
}

int cmd_tensor(const RunConfig& cfg, std::ostream& out) {
  const Stopwatch watch;
  const CorrelationTensor t = correlation_tensor(build_state(cfg));
  const TensorSummary s = summarize(t);
  if (cfg.format == "json") {
    json j = envelope(cfg);
    to_json(j["tensor"], t);
    j["summary"] = {{"nonzero_count", s.nonzero_count},
                    {"frobenius_sq", s.frobenius_sq},
                    {"t_max", s.t_max}};
    j["duration_ms"] = watch.ms();
    out << j.dump(2) << '\n';
  } else {
    out << "qbell " << kVersion << "  tensor  parties=" << t.num_parties() << '\n'
        << "nonzero_count  " << s.nonzero_count << '\n'
        << "frobenius_sq   " << s.frobenius_sq << '\n'
        << "t_max          " << s.t_max << '\n'
        << "duration_ms    " << watch.ms() << '\n';
  }
  return kExitOk;
}

int cmd_criteria(const RunConfig& cfg, std::ostream& out) {
  const Stopwatch watch;
  const CorrelationTensor t = correlation_tensor(build_state(cfg));
  const MaxOptions opts = max_options(cfg);
  const CriterionReport reports[] = {check_two_setting(t, opts), check_plane(t, opts),
                                     check_full_sphere(t, opts)};
  if (cfg.format == "json") {
    json j = envelope(cfg);
    json arr = json::array();
    for (const auto& r : reports) {
      json jr;
      to_json(jr, r);
      arr.push_back(std::move(jr));
    }
    j["reports"] = std::move(arr);
    j["duration_ms"] = watch.ms();
    out << j.dump(2) << '\n';
  } else {
    out << "qbell " << kVersion << "  criteria\n";
    for (const auto& r : reports)
      out << std::left << std::setw(12) << to_string(r.criterion_id) << " lhs=" << r.lhs
          << " rhs=" << r.rhs << (r.violated ? "  VIOLATED" : "  not violated") << '\n';
    out << "duration_ms    " << watch.ms() << '\n';
  }
  return kExitOk;
}

int cmd_threshold(const RunConfig& cfg, std::ostream& out) {
  const Stopwatch watch;
  if (cfg.state_family != "ghz_mixture")
    throw std::invalid_argument("threshold needs a state family with a free parameter "
                                "(ghz_mixture)");
  const StateFamily family = [](double f) { return ghz_noise_mixture(f); };
  const ThresholdResult res =
      threshold(family, criterion_from_string(cfg.criterion), max_options(cfg));
  if (cfg.format == "json") {
    json j = envelope(cfg);
    to_json(j["threshold"], res);
    j["duration_ms"] = watch.ms();
    out << j.dump(2) << '\n';
  } else {
    out << "qbell " << kVersion << "  threshold  criterion=" << cfg.criterion << '\n'
        << "critical_f     " << std::setprecision(10) << res.critical_f << '\n'
        << "bracket        [" << res.bracket.first << ", " << res.bracket.second << "]\n"
        << "method         "
        << (res.method == ThresholdMethod::closed_form ? "closed_form" : "bisection") << '\n'
        << "duration_ms    " << watch.ms() << '\n';
  }
  return kExitOk;
}

struct VerifyCheck {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Identity: honest quadrature of the squared correlation function against the
// closed-form tensor sum.
VerifyCheck check_identity(const CorrelationTensor& t) {
  VerifyCheck c;
  c.name = "identity_inner_product";
  c.measured = inner_product_EE(t);
  c.expected = std::pow(4.0 * M_PI / 3.0, t.num_parties()) * t.frobenius_sq();
  c.tolerance = 1e-7;
  const double rel = std::abs(c.measured - c.expected) / std::max(std::abs(c.expected), 1.0);
  c.pass = rel < c.tolerance;
  return c;
}

// Projection norms of sign responses stay below sqrt(3*pi); sign(cos theta)
// saturates it.
std::vector<VerifyCheck> check_projection_bound(const QuadratureRule& grid, std::uint64_t seed) {
  const double bound = std::sqrt(3.0 * M_PI);
  VerifyCheck sweep;
  sweep.name = "projection_norm_bound";
  sweep.expected = bound;
  sweep.tolerance = 1e-3;
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < 25; ++k) {
    const double norm = project_response(ResponseFunction::sign_of_dot(rng.unit_vector3()), grid).norm;
    worst = std::max(worst, norm);
  }
  sweep.measured = worst;
  sweep.pass = worst <= bound + sweep.tolerance;

  VerifyCheck sat;
  sat.name = "projection_norm_saturation";
  sat.expected = bound;
  sat.tolerance = 1e-3;
  sat.measured = project_response(ResponseFunction::sign_of_dot(Eigen::Vector3d::UnitZ()), grid).norm;
  sat.pass = std::abs(sat.measured - bound) <= sat.tolerance;
  return {sweep, sat};
}

ResponseFunction random_response(Rng& rng) {
  const double pick = rng.uniform();
  if (pick < 0.4) return ResponseFunction::sign_of_dot(rng.unit_vector3());
  if (pick < 0.8)
    return ResponseFunction::two_caps(rng.unit_vector3(), rng.uniform(0.0, M_PI),
                                      rng.unit_vector3(), rng.uniform(0.0, M_PI));
  return ResponseFunction::constant(rng.uniform() < 0.5 ? 1 : -1);
}

// Deterministic-model scalar products stay below (2 pi)^N T_max.
VerifyCheck check_lhv_bound(const CorrelationTensor& t, const QuadratureRule& grid,
                            const MaxOptions& opts) {
  VerifyCheck c;
  c.name = "lhv_scalar_product_bound";
  c.tolerance = 1e-6;
  const double t_max = max_component(t, opts).value;
  Rng rng(opts.seed);
  double worst_gap = -std::numeric_limits<double>::infinity();
  double rhs = 0.0;
  for (int k = 0; k < 20; ++k) {
    std::vector<ResponseFunction> tuple;
    tuple.reserve(t.num_parties());
    for (int p = 0; p < t.num_parties(); ++p) tuple.push_back(random_response(rng));
    const LhvBoundResult r = verify_lhv_bound(tuple, t, grid, t_max);
    worst_gap = std::max(worst_gap, r.lhs - r.rhs);
    rhs = r.rhs;
  }
  c.measured = rhs + worst_gap;  // largest lhs seen
  c.expected = rhs;
  c.pass = worst_gap <= c.tolerance;
  return c;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const Stopwatch watch;
  const CorrelationTensor t = correlation_tensor(build_state(cfg));
  const QuadratureRule grid = dense_midpoint_grid(400, 800);

  std::vector<VerifyCheck> checks;
  checks.push_back(check_identity(t));
  for (auto& c : check_projection_bound(grid, cfg.seed)) checks.push_back(std::move(c));
  checks.push_back(check_lhv_bound(t, grid, max_options(cfg)));

  const bool all_pass =
      std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.pass; });

  if (cfg.format == "json") {
    json j = envelope(cfg);
    json arr = json::array();
    for (const auto& c : checks)
      arr.push_back(json{{"name", c.name},
                         {"measured", c.measured},
                         {"expected", c.expected},
                         {"tolerance", c.tolerance},
                         {"pass", c.pass}});
    j["checks"] = std::move(arr);
    j["all_pass"] = all_pass;
    j["duration_ms"] = watch.ms();
    out << j.dump(2) << '\n';
  } else {
    out << "qbell " << kVersion << "  verify\n" << std::setprecision(10);
    for (const auto& c : checks)
      out << std::left << std::setw(28) << c.name << " measured=" << c.measured
          << " expected=" << c.expected << (c.pass ? "  pass" : "  FAIL") << '\n';
    out << "duration_ms    " << watch.ms() << '\n';
  }
  return all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiqubit correlation tensors and rotation-invariant Bell criteria"};
  app.name("qbell");

  RunConfig cfg;
  auto add_common = [&cfg](CLI::App* cmd) {
    cmd->add_option("--state", cfg.state_family, "State family: ghz_mixture or ghz")
        ->check(CLI::IsMember({"ghz_mixture", "ghz"}));
    cmd->add_option("--f", cfg.f, "Mixture visibility in [0,1]")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--n", cfg.n, "Number of qubits (ghz family)")
        ->check(CLI::Range(2, kMaxQubits));
    cmd->add_flag("--flip-last", cfg.flip_last, "GHZ variant with the last qubit flipped");
    cmd->add_option("--seed", cfg.seed, "Seed for all stochastic behavior");
    cmd->add_option("--restarts", cfg.restarts, "Optimizer restarts")
        ->check(CLI::Range(1, 100000));
    cmd->add_option("--tol", cfg.tol, "Optimizer convergence tolerance")
        ->check(CLI::Range(1e-15, 1.0));
    cmd->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)")
        ->check(CLI::Range(0, 4096));
  };

  CLI::App* tensor_cmd = app.add_subcommand("tensor", "Correlation tensor and summary");
  CLI::App* criteria_cmd =
      app.add_subcommand("criteria", "All three criteria on the configured state");
  CLI::App* threshold_cmd =
      app.add_subcommand("threshold", "Critical visibility for one criterion");
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Quadrature identity and bound verification sweeps");
  for (CLI::App* cmd : {tensor_cmd, criteria_cmd, threshold_cmd, verify_cmd}) add_common(cmd);
  threshold_cmd->add_option("--criterion", cfg.criterion, "Criterion to scan")
      ->check(CLI::IsMember({"two_setting", "plane", "full_sphere"}));
  app.require_subcommand(1);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    set_thread_count(static_cast<unsigned>(cfg.threads));
    if (tensor_cmd->parsed()) {
      cfg.command = "tensor";
      return cmd_tensor(cfg, out);
    }
    if (criteria_cmd->parsed()) {
      cfg.command = "criteria";
      return cmd_criteria(cfg, out);
    }
    if (threshold_cmd->parsed()) {
      cfg.command = "threshold";
      return cmd_threshold(cfg, out);
    }
    cfg.command = "verify";
    return cmd_verify(cfg, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

}  // namespace qbell::cli
