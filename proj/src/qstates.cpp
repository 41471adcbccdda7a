#include "qovk/qstates.hpp"

#include <cmath>
#include <string>

namespace qovk {

PureState::PureState(ComplexVector amplitudes, const Tolerance& tol)
    : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 1) throw ShapeError("PureState: empty amplitude vector");
  if (!amplitudes_.allFinite()) throw DomainError("PureState: non-finite amplitude");
  if (std::abs(amplitudes_.norm() - 1.0) > tol.eps_structural) {
    throw ValidityError("PureState: amplitudes are not normalized (norm " +
                        std::to_string(amplitudes_.norm()) + ")");
  }
}

PureState PureState::basis(Eigen::Index dim, Eigen::Index index) {
  if (index < 0 || index >= dim) throw DomainError("PureState::basis: index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v));
}

DensityMatrix::DensityMatrix(ComplexMatrix m, const Tolerance& tol) : mat_(std::move(m)) {
  if (!is_square(mat_)) throw ShapeError("DensityMatrix: matrix must be square");
  if (!is_density(mat_, tol)) {
    throw ValidityError("DensityMatrix: matrix is not Hermitian, psd and unit-trace");
  }
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::purity() const { return (mat_ * mat_).trace().real(); }

ComplexMatrix ry(double angle) {
  ComplexMatrix r(2, 2);
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  r << c, -s, s, c;
  return r;
}

ComplexMatrix cnot(int num_qubits, int control, int target) {
  if (num_qubits < 2 || control == target || control < 0 || target < 0 ||
      control >= num_qubits || target >= num_qubits) {
    throw DomainError("cnot: invalid qubit indices");
  }
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  const Eigen::Index cbit = Eigen::Index{1} << (num_qubits - 1 - control);
  const Eigen::Index tbit = Eigen::Index{1} << (num_qubits - 1 - target);
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Eigen::Index image = (k & cbit) ? (k ^ tbit) : k;
    m(image, k) = 1.0;
  }
  return m;
}

namespace {

ComplexMatrix angle_unitary(const AngleEncoding& enc, std::span<const double> x) {
  if (enc.num_qubits < 1) throw DomainError("AngleEncoding: num_qubits must be >= 1");
  if (x.size() != static_cast<std::size_t>(enc.num_qubits)) {
    throw ShapeError("AngleEncoding: expected " + std::to_string(enc.num_qubits) +
                     " coordinates, got " + std::to_string(x.size()));
  }
  ComplexMatrix u = ry(x[0]);
  for (std::size_t j = 1; j < x.size(); ++j) u = tensor(u, ry(x[j]));
  const int t = enc.num_qubits;
  if (t == 2) {
    u = cnot(t, 0, 1) * u;
  } else if (t > 2) {
    for (int j = 0; j < t; ++j) u = cnot(t, j, (j + 1) % t) * u;
  }
  return u;
}

}  // namespace

ComplexMatrix encoding_unitary(const Encoder& e, std::span<const double> x) {
  if (const auto* angle = std::get_if<AngleEncoding>(&e)) return angle_unitary(*angle, x);
  const auto& given = std::get<GivenUnitary>(e);
  if (x.size() != given.input_dim) {
    throw ShapeError("GivenUnitary: expected " + std::to_string(given.input_dim) +
                     " coordinates, got " + std::to_string(x.size()));
  }
  ComplexMatrix u = given.unitary_for(x);
  if (!is_unitary(u)) throw DomainError("GivenUnitary: supplied matrix is not unitary");
  return u;
}

PureState encode(const Encoder& e, std::span<const double> x) {
  const ComplexMatrix u = encoding_unitary(e, x);
  return PureState(u.col(0));
}

DensityMatrix to_density(const PureState& p) {
  const ComplexVector& a = p.amplitudes();
  return DensityMatrix(a * a.adjoint());
}

double fidelity_pure(const PureState& x, const PureState& z) {
  if (x.dim() != z.dim()) {
    throw ShapeError("fidelity_pure: dimensions " + std::to_string(x.dim()) + " and " +
                     std::to_string(z.dim()));
  }
  return std::norm(x.amplitudes().dot(z.amplitudes()));
}

PureState random_pure_state(Eigen::Index dim, Rng& rng) {
  ComplexVector v = complex_ginibre(dim, 1, rng).col(0);
  v /= v.norm();
  return PureState(std::move(v));
}

DensityMatrix random_density(Eigen::Index dim, Eigen::Index rank, Rng& rng) {
  if (dim < 1 || rank < 1 || rank > dim) {
    throw DomainError("random_density: need 1 <= rank <= dim (dim " + std::to_string(dim) +
                      ", rank " + std::to_string(rank) + ")");
  }
  const ComplexMatrix g = complex_ginibre(dim, rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(std::move(rho));
}

nlohmann::json state_to_json(const PureState& p) {
  nlohmann::json j = matrix_to_json(p.amplitudes());
  j["kind"] = "pure";
  return j;
}

nlohmann::json state_to_json(const DensityMatrix& d) {
  nlohmann::json j = matrix_to_json(d.matrix());
  j["kind"] = "density";
  return j;
}

PureState pure_state_from_json(const nlohmann::json& j) {
  if (j.at("kind") != "pure") throw ValidityError("pure_state_from_json: kind must be \"pure\"");
  const ComplexMatrix m = matrix_from_json(j);
  if (m.cols() != 1) throw ShapeError("pure_state_from_json: amplitudes must be a column");
  return PureState(m.col(0));
}

DensityMatrix density_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "pure") return to_density(pure_state_from_json(j));
  if (kind != "density") throw ValidityError("density_from_json: unknown kind \"" + kind + "\"");
  return DensityMatrix(matrix_from_json(j));
}

}  // namespace qovk
