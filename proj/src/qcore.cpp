#include "qbell/qcore.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qbell {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_qubit_count(int n) {
  if (n < 1) throw std::invalid_argument("num_qubits must be positive");
  if (n > kMaxQubits)
    throw std::invalid_argument("num_qubits exceeds the dense-representation cap of " +
                                std::to_string(kMaxQubits));
}

}  // namespace

Direction::Direction(double theta, double phi) : theta_(theta), phi_(phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi))
    throw std::invalid_argument("Direction angles must be finite");
  if (theta_ < 0.0 || theta_ > std::numbers::pi)
    throw std::invalid_argument("theta must lie in [0, pi]");
  phi_ = std::fmod(phi_, kTwoPi);
  if (phi_ < 0.0) phi_ += kTwoPi;
}

Direction Direction::from_unit_vector(const Eigen::Vector3d& v) {
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > 1e-10)
    throw std::invalid_argument("Direction::from_unit_vector requires a unit vector");
  const double z = std::clamp(v.z() / norm, -1.0, 1.0);
  double phi = std::atan2(v.y(), v.x());
  if (phi < 0.0) phi += kTwoPi;
  return Direction(std::acos(z), phi);
}

Eigen::Vector3d Direction::unit_vector() const {
  const double st = std::sin(theta_);
  return {st * std::cos(phi_), st * std::sin(phi_), std::cos(theta_)};
}

Ket::Ket(Eigen::VectorXcd amplitudes, int num_qubits)
    : amplitudes_(std::move(amplitudes)), num_qubits_(num_qubits) {
  require_qubit_count(num_qubits_);
  if (amplitudes_.size() != (Eigen::Index{1} << num_qubits_))
    throw std::invalid_argument("amplitude vector length must be 2^num_qubits");
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("Ket must have unit norm");
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries, int num_qubits, unchecked_tag)
    : entries_(std::move(entries)), num_qubits_(num_qubits) {}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries, int num_qubits)
    : DensityMatrix(std::move(entries), num_qubits, unchecked_tag{}) {
  require_qubit_count(num_qubits_);
  const Eigen::Index dim = Eigen::Index{1} << num_qubits_;
  if (entries_.rows() != dim || entries_.cols() != dim)
    throw std::invalid_argument("density matrix must be 2^N x 2^N");
  if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("density matrix must be Hermitian");
  if (std::abs(entries_.trace() - std::complex<double>(1.0)) > 1e-12)
    throw std::invalid_argument("density matrix must have unit trace");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("density matrix must be positive semidefinite");
}

DensityMatrix DensityMatrix::unchecked(Eigen::MatrixXcd entries, int num_qubits) {
  return DensityMatrix(std::move(entries), num_qubits, unchecked_tag{});
}

DensityMatrix DensityMatrix::from_ket(const Ket& psi) {
  const auto& a = psi.amplitudes();
  return DensityMatrix(a * a.adjoint(), psi.num_qubits());
}

LocalUnitary::LocalUnitary(Eigen::Matrix2cd entries) : entries_(std::move(entries)) {
  if ((entries_ * entries_.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("matrix is not unitary");
}

LocalUnitary LocalUnitary::identity() { return LocalUnitary(Eigen::Matrix2cd::Identity()); }

Ket build_ghz(int num_qubits, bool flip_last) {
  if (num_qubits < 2) throw std::invalid_argument("build_ghz requires num_qubits >= 2");
  require_qubit_count(num_qubits);
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(dim);
  // Qubit 1 is the most significant bit, so |z+...z+ z-> is index 1 and
  // |z-...z- z+> is index 2^N - 2.
  const Eigen::Index up = flip_last ? 1 : 0;
  const Eigen::Index down = flip_last ? dim - 2 : dim - 1;
  amps[up] = amps[down] = 1.0 / std::numbers::sqrt2;
  return Ket(std::move(amps), num_qubits);
}

LocalUnitary rotation_unitary(const Eigen::Vector3d& axis, double angle) {
  if (std::abs(axis.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("rotation axis must be a unit vector");
  const std::complex<double> i(0.0, 1.0);
  Eigen::Matrix2cd sigma;
  sigma << axis.z(), axis.x() - i * axis.y(),  //
      axis.x() + i * axis.y(), -axis.z();
  const Eigen::Matrix2cd u = std::cos(angle / 2.0) * Eigen::Matrix2cd::Identity() -
                             i * std::sin(angle / 2.0) * sigma;
  return LocalUnitary(u);
}

Ket apply_local_unitary(const Ket& state, const LocalUnitary& u) {
  const int n = state.num_qubits();
  Eigen::VectorXcd amps = state.amplitudes();
  const auto& m = u.matrix();
  for (int q = 0; q < n; ++q) {
    const Eigen::Index stride = Eigen::Index{1} << (n - 1 - q);
    for (Eigen::Index base = 0; base < amps.size(); base += 2 * stride) {
      for (Eigen::Index k = 0; k < stride; ++k) {
        const std::complex<double> a0 = amps[base + k];
        const std::complex<double> a1 = amps[base + k + stride];
        amps[base + k] = m(0, 0) * a0 + m(0, 1) * a1;
        amps[base + k + stride] = m(1, 0) * a0 + m(1, 1) * a1;
      }
    }
  }
  return Ket(std::move(amps), n);
}

DensityMatrix maximally_mixed(int num_qubits) {
  require_qubit_count(num_qubits);
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  return DensityMatrix(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim),
                       num_qubits);
}

DensityMatrix mix(double p, const DensityMatrix& a, const DensityMatrix& b) {
  if (p < 0.0 || p > 1.0 || !std::isfinite(p))
    throw std::invalid_argument("mixing probability must lie in [0, 1]");
  if (a.num_qubits() != b.num_qubits())
    throw std::invalid_argument("mix requires equal qubit counts");
  return DensityMatrix(p * a.entries() + (1.0 - p) * b.entries(), a.num_qubits());
}

DensityMatrix ghz_noise_mixture(double visibility_f) {
  if (!(visibility_f >= 0.0 && visibility_f <= 1.0))
    throw std::invalid_argument("visibility must lie in [0, 1]");
  constexpr int n = 6;
  const LocalUnitary u =
      rotation_unitary(Eigen::Vector3d(1, 1, 1).normalized(), 2.0 * std::numbers::pi / 3.0);
  const Ket psi3 = build_ghz(n, /*flip_last=*/true);
  const Ket psi1 = apply_local_unitary(psi3, u);
  const Ket psi2 = apply_local_unitary(psi1, u);
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (const Ket* psi : {&psi1, &psi2, &psi3}) {
    const auto& a = psi->amplitudes();
    rho += (visibility_f / 3.0) * (a * a.adjoint());
  }
  rho += (1.0 - visibility_f) / static_cast<double>(dim) *
         Eigen::MatrixXcd::Identity(dim, dim);
  return DensityMatrix(std::move(rho), n);
}

}  // namespace qbell
