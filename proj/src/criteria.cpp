#include "qbell/criteria.hpp"

#include <cmath>
#include <stdexcept>

namespace qbell {

namespace {

constexpr double kViolationMargin = 1e-9;

bool violates(double lhs, double rhs) { return lhs > rhs + kViolationMargin; }

}  // namespace

std::string to_string(CriterionId id) {
  switch (id) {
    case CriterionId::two_setting: return "two_setting";
    case CriterionId::plane: return "plane";
    case CriterionId::full_sphere: return "full_sphere";
  }
  throw std::invalid_argument("unknown criterion id");
}

CriterionId criterion_from_string(const std::string& s) {
  if (s == "two_setting") return CriterionId::two_setting;
  if (s == "plane") return CriterionId::plane;
  if (s == "full_sphere") return CriterionId::full_sphere;
  throw std::invalid_argument("unknown criterion: " + s);
}

CriterionReport check_two_setting(const CorrelationTensor& tensor, const MaxOptions& opts) {
  const PlaneOptResult pr = best_plane(tensor, opts);
  CriterionReport r;
  r.criterion_id = CriterionId::two_setting;
  r.lhs = pr.restricted_sum;
  r.rhs = 1.0;
  r.violated = violates(r.lhs, r.rhs);
  r.frame = pr.frame;
  r.diagnostics.restarts_used = pr.restarts_used;
  r.diagnostics.in_plane_tmax = pr.in_plane_tmax;
  r.diagnostics.seed = pr.seed;
  return r;
}

CriterionReport check_plane(const CorrelationTensor& tensor, const MaxOptions& opts) {
  const PlaneOptResult pr = best_plane(tensor, opts);
  const MaxComponentResult mc = max_component(tensor, opts);
  CriterionReport r;
  r.criterion_id = CriterionId::plane;
  r.lhs = pr.restricted_sum;
  r.rhs = std::pow(4.0 / M_PI, tensor.num_parties()) * pr.in_plane_tmax;
  r.violated = violates(r.lhs, r.rhs);
  r.frame = pr.frame;
  r.diagnostics.restarts_used = pr.restarts_used;
  r.diagnostics.converged = mc.converged;
  r.diagnostics.t_max = mc.value;
  r.diagnostics.in_plane_tmax = pr.in_plane_tmax;
  r.diagnostics.tmax_differs = std::abs(mc.value - pr.in_plane_tmax) > 1e-6;
  r.diagnostics.seed = pr.seed;
  return r;
}

CriterionReport check_full_sphere(const CorrelationTensor& tensor, const MaxOptions& opts) {
  const MaxComponentResult mc = max_component(tensor, opts);
  CriterionReport r;
  r.criterion_id = CriterionId::full_sphere;
  r.lhs = tensor.frobenius_sq();
  r.rhs = std::pow(1.5, tensor.num_parties()) * mc.value;
  r.violated = violates(r.lhs, r.rhs);
  r.directions = mc.directions;
  r.diagnostics.restarts_used = mc.restarts_used;
  r.diagnostics.converged = mc.converged;
  r.diagnostics.t_max = mc.value;
  r.diagnostics.seed = mc.seed;
  return r;
}

CriterionReport check(CriterionId id, const CorrelationTensor& tensor, const MaxOptions& opts) {
  switch (id) {
    case CriterionId::two_setting: return check_two_setting(tensor, opts);
    case CriterionId::plane: return check_plane(tensor, opts);
    case CriterionId::full_sphere: return check_full_sphere(tensor, opts);
  }
  throw std::invalid_argument("unknown criterion id");
}

namespace {

ThresholdResult boundary_result(CriterionId id, BoundaryFlag flag, ThresholdMethod method,
                                std::uint64_t seed) {
  const double f = (flag == BoundaryFlag::always_violated) ? 0.0 : 1.0;
  return ThresholdResult{.criterion_id = id,
                         .critical_f = f,
                         .bracket = {f, f},
                         .method = method,
                         .boundary = flag,
                         .seed = seed};
}

}  // namespace

ThresholdResult threshold(const StateFamily& family, CriterionId id, const MaxOptions& opts) {
  const CorrelationTensor t1 = correlation_tensor(family(1.0));
  const CorrelationTensor th = correlation_tensor(family(0.5));

  bool linear = true;
  for (std::size_t i = 0; i < t1.values().size(); ++i) {
    if (std::abs(th[i] - 0.5 * t1[i]) > 1e-12) {
      linear = false;
      break;
    }
  }

  if (linear) {
    // With T(f) = f T(1) the optimal settings are scale invariant, so the
    // squared left side grows as f^2 lhs1 while the right side is either the
    // constant 1 or f rhs1; the crossing is explicit.
    const CriterionReport rep = check(id, t1, opts);
    double fstar;
    if (id == CriterionId::two_setting) {
      fstar = rep.lhs > 0.0 ? std::sqrt(1.0 / rep.lhs) : 2.0;
    } else {
      fstar = rep.lhs > 0.0 ? rep.rhs / rep.lhs : 2.0;
    }
    if (fstar >= 1.0)
      return boundary_result(id, BoundaryFlag::never_violated, ThresholdMethod::closed_form,
                             opts.seed);
    if (fstar <= 0.0)
      return boundary_result(id, BoundaryFlag::always_violated, ThresholdMethod::closed_form,
                             opts.seed);
    return ThresholdResult{.criterion_id = id,
                           .critical_f = fstar,
                           .bracket = {fstar, fstar},
                           .method = ThresholdMethod::closed_form,
                           .boundary = BoundaryFlag::none,
                           .seed = opts.seed};
  }

  // Nonlinear family: require the verdict to flip at most once (false to
  // true) across 11 samples, then bisect the flip interval.
  constexpr int kSamples = 11;
  bool verdict[kSamples];
  for (int i = 0; i < kSamples; ++i) {
    const double f = static_cast<double>(i) / (kSamples - 1);
    verdict[i] = check(id, correlation_tensor(family(f)), opts).violated;
  }
  for (int i = 1; i < kSamples; ++i)
    if (verdict[i - 1] && !verdict[i])
      throw std::invalid_argument("violation verdict is not monotone in f");
  if (!verdict[kSamples - 1])
    return boundary_result(id, BoundaryFlag::never_violated, ThresholdMethod::bisection,
                           opts.seed);
  if (verdict[0])
    return boundary_result(id, BoundaryFlag::always_violated, ThresholdMethod::bisection,
                           opts.seed);

  int flip = 1;
  while (!verdict[flip]) ++flip;
  double lo = static_cast<double>(flip - 1) / (kSamples - 1);
  double hi = static_cast<double>(flip) / (kSamples - 1);
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (check(id, correlation_tensor(family(mid)), opts).violated)
      hi = mid;
    else
      lo = mid;
  }
  return ThresholdResult{.criterion_id = id,
                         .critical_f = 0.5 * (lo + hi),
                         .bracket = {lo, hi},
                         .method = ThresholdMethod::bisection,
                         .boundary = BoundaryFlag::none,
                         .seed = opts.seed};
}

void to_json(nlohmann::json& j, const CriterionReport& r) {
  j = nlohmann::json{{"criterion_id", to_string(r.criterion_id)},
                     {"lhs", r.lhs},
                     {"rhs", r.rhs},
                     {"violated", r.violated}};
  if (r.frame) {
    nlohmann::json frames = nlohmann::json::array();
    for (int p = 0; p < r.frame->num_parties(); ++p) {
      const Eigen::Matrix3d& m = r.frame->rotation(p);
      nlohmann::json rows = nlohmann::json::array();
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) rows.push_back(m(a, b));
      frames.push_back(std::move(rows));
    }
    j["frame"] = std::move(frames);
  }
  if (!r.directions.empty()) {
    nlohmann::json dirs = nlohmann::json::array();
    for (const auto& d : r.directions)
      dirs.push_back(nlohmann::json{{"theta", d.theta()}, {"phi", d.phi()}});
    j["directions"] = std::move(dirs);
  }
  nlohmann::json diag{{"restarts_used", r.diagnostics.restarts_used},
                      {"converged", r.diagnostics.converged},
                      {"seed", r.diagnostics.seed}};
  if (std::isfinite(r.diagnostics.t_max)) diag["t_max"] = r.diagnostics.t_max;
  if (std::isfinite(r.diagnostics.in_plane_tmax))
    diag["in_plane_tmax"] = r.diagnostics.in_plane_tmax;
  if (r.criterion_id == CriterionId::plane) diag["tmax_differs"] = r.diagnostics.tmax_differs;
  j["diagnostics"] = std::move(diag);
}

void to_json(nlohmann::json& j, const ThresholdResult& r) {
  const char* method = r.method == ThresholdMethod::closed_form ? "closed_form" : "bisection";
  const char* boundary = r.boundary == BoundaryFlag::none
                             ? "none"
                             : (r.boundary == BoundaryFlag::never_violated ? "never_violated"
                                                                           : "always_violated");
  j = nlohmann::json{{"criterion_id", to_string(r.criterion_id)},
                     {"critical_f", r.critical_f},
                     {"bracket", {r.bracket.first, r.bracket.second}},
                     {"method", method},
                     {"boundary", boundary},
                     {"seed", r.seed}};
}

}  // namespace qbell
