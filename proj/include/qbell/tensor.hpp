#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include <json.hpp>

#include "qbell/qcore.hpp"

namespace qbell {

/// Full N-party correlation tensor: the 3^N expectation values of Pauli
/// products, stored row-major with party 1 as the slowest index and axis
/// values x,y,z mapped to offsets 0,1,2.
class CorrelationTensor {
 public:
  CorrelationTensor(std::vector<double> values, int num_parties);

  static CorrelationTensor zero(int num_parties);

  int num_parties() const { return num_parties_; }
  std::size_t size() const { return values_.size(); }

  const std::vector<double>& values() const { return values_; }

  double operator[](std::size_t flat) const { return values_[flat]; }
  double& operator[](std::size_t flat) { return values_[flat]; }

  // Multi-index access with per-party axis offsets in {0,1,2}.
  double at(std::span<const int> idx) const;
  double at(std::initializer_list<int> idx) const;

  double frobenius_sq() const;
  double max_abs_entry() const;

 private:
  std::vector<double> values_;
  int num_parties_;
};

/// One 3x3 proper rotation per party, giving each observer's Cartesian axes.
class LocalFrame {
 public:
  explicit LocalFrame(std::vector<Eigen::Matrix3d> rotations);

  static LocalFrame identity(int num_parties);

  // Per-party Z-Y-Z angles: R = Rz(alpha) Ry(beta) Rz(gamma).
  static LocalFrame from_euler(std::span<const Eigen::Vector3d> angles);

  int num_parties() const { return static_cast<int>(rotations_.size()); }
  const Eigen::Matrix3d& rotation(int party) const { return rotations_[party]; }
  const std::vector<Eigen::Matrix3d>& rotations() const { return rotations_; }

 private:
  std::vector<Eigen::Matrix3d> rotations_;
};

/// All 3^N components Tr[rho sigma_{i1} (x) ... (x) sigma_{iN}].
/// Throws if any trace has imaginary residue above 1e-8.
CorrelationTensor correlation_tensor(const DensityMatrix& state);

/// Change of local bases: T'_{j1..jN} = sum T_{i1..iN} R1_{i1 j1} ... RN_{iN jN}.
CorrelationTensor rotate(const CorrelationTensor& tensor, const LocalFrame& frame);

/// Correlation function at the given settings: the multilinear contraction
/// of the tensor with the parties' direction vectors.
double component(const CorrelationTensor& tensor, std::span<const Direction> directions);

/// Contraction with arbitrary (not necessarily unit) per-party 3-vectors.
double contract(const CorrelationTensor& tensor, std::span<const Eigen::Vector3d> vectors);

/// Sum of squared components over the first two axes of every party, in the
/// tensor's current frame. Rotate first to examine another plane.
double restrict_to_plane(const CorrelationTensor& tensor);

void to_json(nlohmann::json& j, const CorrelationTensor& t);
void from_json(const nlohmann::json& j, CorrelationTensor& t);

}  // namespace qbell
