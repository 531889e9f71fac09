#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace qbell {

// Dense representations only; above this the 2^N x 2^N matrices stop being a
// desk-scale object.
inline constexpr int kMaxQubits = 10;

/// Measurement direction on the Bloch sphere, stored as spherical angles
/// theta in [0, pi], phi in [0, 2*pi).
class Direction {
 public:
  Direction(double theta, double phi);

  static Direction from_unit_vector(const Eigen::Vector3d& v);

  double theta() const { return theta_; }
  double phi() const { return phi_; }

  // (sin t cos p, sin t sin p, cos t)
  Eigen::Vector3d unit_vector() const;

 private:
  double theta_;
  double phi_;
};

/// Pure N-qubit state. Qubit 1 is the most significant bit of the basis
/// index. Unit norm is enforced on construction (1e-12).
class Ket {
 public:
  Ket(Eigen::VectorXcd amplitudes, int num_qubits);

  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  int num_qubits() const { return num_qubits_; }

 private:
  Eigen::VectorXcd amplitudes_;
  int num_qubits_;
};

/// N-qubit mixed state. Construction checks Hermiticity (1e-12 entrywise),
/// unit trace (1e-12) and positive semidefiniteness (eigenvalues >= -1e-10).
class DensityMatrix {
 public:
  DensityMatrix(Eigen::MatrixXcd entries, int num_qubits);

  // Skips the invariant checks. Intended for tests that need to feed
  // deliberately broken operators into downstream guards.
  static DensityMatrix unchecked(Eigen::MatrixXcd entries, int num_qubits);

  static DensityMatrix from_ket(const Ket& psi);

  const Eigen::MatrixXcd& entries() const { return entries_; }
  int num_qubits() const { return num_qubits_; }

 private:
  struct unchecked_tag {};
  DensityMatrix(Eigen::MatrixXcd entries, int num_qubits, unchecked_tag);

  Eigen::MatrixXcd entries_;
  int num_qubits_;
};

/// Single-qubit unitary; U U^dagger = Id within 1e-12.
class LocalUnitary {
 public:
  explicit LocalUnitary(Eigen::Matrix2cd entries);

  static LocalUnitary identity();

  const Eigen::Matrix2cd& matrix() const { return entries_; }

 private:
  Eigen::Matrix2cd entries_;
};

/// (|z+...z+ a> + |z-...z- b>)/sqrt(2); the last qubit is flipped relative
/// to the rest when flip_last is set.
Ket build_ghz(int num_qubits, bool flip_last);

/// exp(-i angle/2 axis.sigma) in closed form
/// cos(angle/2) Id - i sin(angle/2) axis.sigma. axis must be unit (1e-10).
LocalUnitary rotation_unitary(const Eigen::Vector3d& axis, double angle);

/// (u (x) u (x) ... (x) u) |state>
Ket apply_local_unitary(const Ket& state, const LocalUnitary& u);

DensityMatrix maximally_mixed(int num_qubits);

/// Convex mixture p a + (1-p) b.
DensityMatrix mix(double p, const DensityMatrix& a, const DensityMatrix& b);

/// Six-qubit state (f/3) sum_k |psi_k><psi_k| + (1-f) Id/2^6, where psi_3 is
/// the z-basis GHZ state with the last qubit flipped and psi_1, psi_2 are its
/// images under one and two applications of the cyclic Bloch rotation
/// rotation_unitary((1,1,1)/sqrt(3), 2*pi/3) on every qubit.
DensityMatrix ghz_noise_mixture(double visibility_f);

}  // namespace qbell
