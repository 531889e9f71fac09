#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "qbell/maximize.hpp"
#include "qbell/tensor.hpp"

namespace qbell {

enum class CriterionId { two_setting, plane, full_sphere };

std::string to_string(CriterionId id);
CriterionId criterion_from_string(const std::string& s);

/// Outcome of one local-realism condition. `violated` means lhs > rhs + 1e-9;
/// boundary cases report not-violated, matching the inequalities' <=.
///
/// Semantics differ across the three conditions: the two-setting condition is
/// sufficient for a local model of a two-setting experiment (lhs <= 1 means a
/// model exists), while the plane and full-sphere conditions are necessary
/// (violation rules the model out).
struct CriterionReport {
  CriterionId criterion_id = CriterionId::full_sphere;
  double lhs = 0.0;
  double rhs = 0.0;
  bool violated = false;

  // Optimizer output used for the comparison.
  std::optional<LocalFrame> frame;          // plane-based criteria
  std::vector<Direction> directions;        // full-sphere T_max settings

  // NaN marks a quantity the criterion does not use; JSON output skips it.
  struct Diagnostics {
    int restarts_used = 0;
    bool converged = true;
    double t_max = std::numeric_limits<double>::quiet_NaN();         // unrestricted
    double in_plane_tmax = std::numeric_limits<double>::quiet_NaN();  // within planes
    bool tmax_differs = false;  // plane criterion: the two maxima disagree > 1e-6
    std::uint64_t seed = 0;
  } diagnostics;
};

enum class ThresholdMethod { closed_form, bisection };
enum class BoundaryFlag { none, never_violated, always_violated };

struct ThresholdResult {
  CriterionId criterion_id = CriterionId::full_sphere;
  double critical_f = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  ThresholdMethod method = ThresholdMethod::bisection;
  BoundaryFlag boundary = BoundaryFlag::none;
  std::uint64_t seed = 0;
};

/// Two-setting condition: max over plane orientations of the plane-restricted
/// squared sum, against the constant bound 1.
CriterionReport check_two_setting(const CorrelationTensor& tensor, const MaxOptions& opts = {});

/// Plane condition: the same left-hand side against (4/pi)^N times the
/// maximal component within the optimal planes. The exponent is established
/// for N = 6; other N extrapolate the same pattern.
CriterionReport check_plane(const CorrelationTensor& tensor, const MaxOptions& opts = {});

/// Full-sphere condition: the total squared sum (frame independent) against
/// (3/2)^N times the unrestricted maximal component.
CriterionReport check_full_sphere(const CorrelationTensor& tensor, const MaxOptions& opts = {});

CriterionReport check(CriterionId id, const CorrelationTensor& tensor, const MaxOptions& opts = {});

using StateFamily = std::function<DensityMatrix(double)>;

/// Critical visibility where the criterion starts being violated on [0,1].
/// When the family's tensor scales linearly in f (checked by comparing the
/// tensors at f = 0.5 and f = 1) the quadratic-vs-linear crossing is solved in
/// closed form; otherwise bisection narrows the bracket to 1e-6. The violation
/// verdict must flip at most once from false to true over 11 samples;
/// otherwise the family is rejected as non-monotone.
ThresholdResult threshold(const StateFamily& family, CriterionId id, const MaxOptions& opts = {});

void to_json(nlohmann::json& j, const CriterionReport& r);
void to_json(nlohmann::json& j, const ThresholdResult& r);

}  // namespace qbell
