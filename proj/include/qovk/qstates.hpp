#pragma once

#include <functional>
#include <span>
#include <variant>

#include "qovk/clinalg.hpp"

namespace qovk {

/// Normalized state vector. Construction validates the norm.
class PureState {
 public:
  explicit PureState(ComplexVector amplitudes, const Tolerance& tol = kDefaultTolerance);

  /// |0...0> on `dim` levels.
  static PureState basis(Eigen::Index dim, Eigen::Index index);

  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }
  /// Qubit count, or -1 when dim is not a power of two.
  int num_qubits() const noexcept { return log2_dim(dim()); }

 private:
  ComplexVector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m, const Tolerance& tol = kDefaultTolerance);

  static DensityMatrix maximally_mixed(Eigen::Index dim);

  const ComplexMatrix& matrix() const noexcept { return mat_; }
  Eigen::Index dim() const noexcept { return mat_.rows(); }
  double purity() const;

 private:
  ComplexMatrix mat_;
};

/// R_y(x_j) on qubit j for every coordinate, then a ring of CNOTs
/// (control j, target j+1 mod t). Two qubits use the single CNOT 0->1.
struct AngleEncoding {
  int num_qubits = 1;
};

/// Explicit U_x supplied by the caller.
struct GivenUnitary {
  std::function<ComplexMatrix(std::span<const double>)> unitary_for;
  std::size_t input_dim = 0;
};

using Encoder = std::variant<AngleEncoding, GivenUnitary>;

ComplexMatrix ry(double angle);
/// CNOT on an n-qubit register; qubit 0 is the most significant.
ComplexMatrix cnot(int num_qubits, int control, int target);

ComplexMatrix encoding_unitary(const Encoder& e, std::span<const double> x);
PureState encode(const Encoder& e, std::span<const double> x);

DensityMatrix to_density(const PureState& p);
double fidelity_pure(const PureState& x, const PureState& z);

PureState random_pure_state(Eigen::Index dim, Rng& rng);
/// Hilbert-Schmidt (Ginibre) ensemble: G G^dagger / Tr with G of shape dim x rank.
DensityMatrix random_density(Eigen::Index dim, Eigen::Index rank, Rng& rng);

nlohmann::json state_to_json(const PureState& p);
nlohmann::json state_to_json(const DensityMatrix& d);
PureState pure_state_from_json(const nlohmann::json& j);
/// Accepts both "pure" and "density" kinds; pure states are promoted.
DensityMatrix density_from_json(const nlohmann::json& j);

}  // namespace qovk
