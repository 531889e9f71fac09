#include "qbell/tensor.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "qbell/util.hpp"

namespace qbell {

namespace {

std::size_t pow3(int n) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) r *= 3;
  return r;
}

Eigen::Matrix3d rot_z(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), -std::sin(a), 0,  //
      std::sin(a), std::cos(a), 0,    //
      0, 0, 1;
  return r;
}

Eigen::Matrix3d rot_y(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), 0, std::sin(a),  //
      0, 1, 0,                       //
      -std::sin(a), 0, std::cos(a);
  return r;
}

}  // namespace

CorrelationTensor::CorrelationTensor(std::vector<double> values, int num_parties)
    : values_(std::move(values)), num_parties_(num_parties) {
  if (num_parties_ < 1) throw std::invalid_argument("num_parties must be positive");
  if (values_.size() != pow3(num_parties_))
    throw std::invalid_argument("correlation tensor must hold 3^N values");
}

CorrelationTensor CorrelationTensor::zero(int num_parties) {
  return CorrelationTensor(std::vector<double>(pow3(num_parties), 0.0), num_parties);
}

double CorrelationTensor::at(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != num_parties_)
    throw std::invalid_argument("index arity must equal num_parties");
  std::size_t flat = 0;
  for (int i : idx) {
    if (i < 0 || i > 2) throw std::invalid_argument("axis offsets must lie in {0,1,2}");
    flat = flat * 3 + static_cast<std::size_t>(i);
  }
  return values_[flat];
}

double CorrelationTensor::at(std::initializer_list<int> idx) const {
  return at(std::span<const int>(idx.begin(), idx.size()));
}

double CorrelationTensor::frobenius_sq() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

double CorrelationTensor::max_abs_entry() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

LocalFrame::LocalFrame(std::vector<Eigen::Matrix3d> rotations) : rotations_(std::move(rotations)) {
  if (rotations_.empty()) throw std::invalid_argument("LocalFrame needs at least one rotation");
  for (const auto& r : rotations_) {
    if ((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("frame rotation is not orthogonal");
    if (std::abs(r.determinant() - 1.0) > 1e-10)
      throw std::invalid_argument("frame rotation must be proper (det = +1)");
  }
}

LocalFrame LocalFrame::identity(int num_parties) {
  return LocalFrame(std::vector<Eigen::Matrix3d>(num_parties, Eigen::Matrix3d::Identity()));
}

LocalFrame LocalFrame::from_euler(std::span<const Eigen::Vector3d> angles) {
  std::vector<Eigen::Matrix3d> rs;
  rs.reserve(angles.size());
  for (const auto& a : angles) rs.push_back(rot_z(a[0]) * rot_y(a[1]) * rot_z(a[2]));
  return LocalFrame(std::move(rs));
}

CorrelationTensor correlation_tensor(const DensityMatrix& state) {
  const int n = state.num_qubits();
  const std::size_t size = pow3(n);
  const std::size_t dim = std::size_t{1} << n;
  const Eigen::MatrixXcd& rho = state.entries();

  std::vector<double> values(size);
  double max_imag = 0.0;
  std::vector<double> imag_residues(thread_count() > 1 ? size : 0);

  // A Pauli product has exactly one nonzero per matrix column, so
  // Tr[rho sigma_{i1} (x) ... (x) sigma_{iN}] needs only 2^N terms: each
  // basis state |j> maps to coeff(j) |j'> with j' = j xor flips.
  auto body = [&](std::size_t begin, std::size_t end) {
    std::vector<int> digits(n);
    for (std::size_t t = begin; t < end; ++t) {
      std::size_t rem = t;
      for (int q = n - 1; q >= 0; --q) {
        digits[q] = static_cast<int>(rem % 3);
        rem /= 3;
      }
      std::size_t flips = 0;
      for (int q = 0; q < n; ++q)
        if (digits[q] != 2) flips |= std::size_t{1} << (n - 1 - q);

      std::complex<double> sum = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        std::complex<double> coeff = 1.0;
        for (int q = 0; q < n; ++q) {
          const bool bit = (j >> (n - 1 - q)) & 1u;
          switch (digits[q]) {
            case 0:  // sigma_x
              break;
            case 1:  // sigma_y: |0> -> i|1>, |1> -> -i|0>
              coeff *= bit ? std::complex<double>(0, -1) : std::complex<double>(0, 1);
              break;
            default:  // sigma_z
              if (bit) coeff = -coeff;
              break;
          }
        }
        sum += rho(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j ^ flips)) * coeff;
      }
      values[t] = sum.real();
      if (imag_residues.empty())
        max_imag = std::max(max_imag, std::abs(sum.imag()));
      else
        imag_residues[t] = std::abs(sum.imag());
    }
  };
  parallel_for(size, body);
  for (double r : imag_residues) max_imag = std::max(max_imag, r);

  if (max_imag > 1e-8)
    throw std::runtime_error("Pauli expectation has imaginary residue " +
                             std::to_string(max_imag) + "; input is not Hermitian");
  return CorrelationTensor(std::move(values), n);
}

CorrelationTensor rotate(const CorrelationTensor& tensor, const LocalFrame& frame) {
  const int n = tensor.num_parties();
  if (frame.num_parties() != n)
    throw std::invalid_argument("frame size must match tensor party count");
  std::vector<double> cur = tensor.values();
  std::vector<double> next(cur.size());
  for (int p = 0; p < n; ++p) {
    const Eigen::Matrix3d& r = frame.rotation(p);
    const std::size_t stride = pow3(n - 1 - p);
    for (std::size_t outer = 0; outer < cur.size(); outer += 3 * stride) {
      for (std::size_t s = 0; s < stride; ++s) {
        const double a0 = cur[outer + s];
        const double a1 = cur[outer + s + stride];
        const double a2 = cur[outer + s + 2 * stride];
        for (int j = 0; j < 3; ++j)
          next[outer + s + static_cast<std::size_t>(j) * stride] =
              r(0, j) * a0 + r(1, j) * a1 + r(2, j) * a2;
      }
    }
    cur.swap(next);
  }
  return CorrelationTensor(std::move(cur), n);
}

double contract(const CorrelationTensor& tensor, std::span<const Eigen::Vector3d> vectors) {
  const int n = tensor.num_parties();
  if (static_cast<int>(vectors.size()) != n)
    throw std::invalid_argument("need one vector per party");
  std::vector<double> cur = tensor.values();
  // Contract the (contiguous) last party repeatedly.
  for (int p = n - 1; p >= 0; --p) {
    const Eigen::Vector3d& c = vectors[p];
    const std::size_t reduced = cur.size() / 3;
    for (std::size_t m = 0; m < reduced; ++m)
      cur[m] = cur[3 * m] * c[0] + cur[3 * m + 1] * c[1] + cur[3 * m + 2] * c[2];
    cur.resize(reduced);
  }
  return cur[0];
}

double component(const CorrelationTensor& tensor, std::span<const Direction> directions) {
  std::vector<Eigen::Vector3d> vs;
  vs.reserve(directions.size());
  for (const auto& d : directions) vs.push_back(d.unit_vector());
  return contract(tensor, vs);
}

double restrict_to_plane(const CorrelationTensor& tensor) {
  const int n = tensor.num_parties();
  const std::size_t combos = std::size_t{1} << n;
  double s = 0.0;
  for (std::size_t mask = 0; mask < combos; ++mask) {
    std::size_t flat = 0;
    for (int q = 0; q < n; ++q) flat = flat * 3 + ((mask >> (n - 1 - q)) & 1u);
    const double v = tensor[flat];
    s += v * v;
  }
  return s;
}

void to_json(nlohmann::json& j, const CorrelationTensor& t) {
  j = nlohmann::json{{"num_parties", t.num_parties()}, {"values", t.values()}};
}

void from_json(const nlohmann::json& j, CorrelationTensor& t) {
  t = CorrelationTensor(j.at("values").get<std::vector<double>>(), j.at("num_parties").get<int>());
}

}  // namespace qbell
