#pragma once

// Quantum kernels: the fidelity kernel, separable and entangled
// operator-valued kernels, block Gram matrices and psd diagnostics.

#include <string>
#include <variant>
#include <vector>

#include "qovk/clinalg.hpp"
#include "qovk/qstates.hpp"

namespace qovk {

enum class FeatureRule {
  /// sigma = rho_x rho_z. Tr(sigma) is the fidelity kernel on pure inputs.
  Product,
  /// The swap-test feature matrix (rho_x + rho_z + rho_x rho_z + rho_z rho_x)
  /// / (2 (1 + Tr rho_x rho_z)); pure inputs only.
  Symmetrized,
  /// sigma = vec(rho_x) vec(rho_z)^dagger (column-major vec), an a^2 x a^2
  /// matrix; used when the coupling acts on vectorized operators.
  VectorizedOuter,
};

std::string to_string(FeatureRule rule);
FeatureRule feature_rule_from_string(const std::string& name);

/// Side of the feature matrix produced from d x d inputs.
Eigen::Index feature_dim(FeatureRule rule, Eigen::Index input_dim);

ComplexMatrix feature_matrix(FeatureRule rule, const DensityMatrix& rho_x,
                             const DensityMatrix& rho_z, const Tolerance& tol = kDefaultTolerance);

/// Tr[rho_x rho_z].
double scalar_kernel(const DensityMatrix& rho_x, const DensityMatrix& rho_z);

/// K(x,z) = Tr_X[U (rho_Y (x) sigma) U^dagger]; U acts on Y (x) X with Y first.
struct UnitaryDilation {
  ComplexMatrix unitary;
  DensityMatrix rho_y;
};

/// K(x,z) = sum_i M_i sigma M_i^dagger with every M_i of shape p x m.
struct KrausForm {
  std::vector<ComplexMatrix> ops;
};

using Coupling = std::variant<UnitaryDilation, KrausForm>;

class OVKernelSpec {
 public:
  static OVKernelSpec unitary(FeatureRule rule, ComplexMatrix u, DensityMatrix rho_y,
                              const Tolerance& tol = kDefaultTolerance);
  static OVKernelSpec kraus(FeatureRule rule, std::vector<ComplexMatrix> ops);

  FeatureRule feature_rule() const noexcept { return rule_; }
  const Coupling& coupling() const noexcept { return coupling_; }
  /// Output dimension.
  Eigen::Index p() const noexcept { return p_; }
  /// Feature-matrix dimension.
  Eigen::Index m() const noexcept { return m_; }

 private:
  OVKernelSpec(FeatureRule rule, Coupling coupling, Eigen::Index p, Eigen::Index m)
      : rule_(rule), coupling_(std::move(coupling)), p_(p), m_(m) {}

  FeatureRule rule_;
  Coupling coupling_;
  Eigen::Index p_;
  Eigen::Index m_;
};

/// Tag for the scalar fidelity kernel (block side 1).
struct ScalarKernel {};

using KernelChoice = std::variant<ScalarKernel, OVKernelSpec>;

Eigen::Index block_dim(const KernelChoice& k);

ComplexMatrix eval_ovk(const OVKernelSpec& spec, const DensityMatrix& rho_x,
                       const DensityMatrix& rho_z);
/// Dispatches on the kernel kind; the scalar kernel yields a 1x1 matrix.
ComplexMatrix eval_kernel(const KernelChoice& k, const DensityMatrix& rho_x,
                          const DensityMatrix& rho_z);

/// {I, X, Y, Z}/2 for p = 2, or the 16 two-qubit Pauli products /4 for p = 4.
/// The full set satisfies sum_i M_i^dagger M_i = I and maps every sigma to
/// Tr(sigma) I/p.
std::vector<ComplexMatrix> pauli_kraus_set(Eigen::Index p);

/// Pauli channel superoperators acting on column-major vec of b x b matrices:
/// {conj(P) (x) P} / sqrt(r) for the r = b^2 Paulis P on log2(b) qubits.
/// The kernel they induce spans exactly the Pauli-diagonal maps.
std::vector<ComplexMatrix> pauli_superoperator_kraus_set(Eigen::Index b);

/// Singular values of the realigned operator; a single nonzero value means
/// u = A (x) B.
RealVector operator_schmidt_coefficients(const ComplexMatrix& u, Eigen::Index p, Eigen::Index m);
bool is_product_operator(const ComplexMatrix& u, Eigen::Index p, Eigen::Index m,
                         double threshold = 1e-6);

/// Haar unitary on the pm-dimensional space, resampled while it is within
/// 1e-6 of a product A_Y (x) B_X.
ComplexMatrix sample_entangled_unitary(Eigen::Index p, Eigen::Index m, Rng& rng);

class BlockGram {
 public:
  BlockGram(Eigen::Index n, Eigen::Index p);

  Eigen::Index n() const noexcept { return n_; }
  Eigen::Index p() const noexcept { return p_; }
  const ComplexMatrix& block(Eigen::Index i, Eigen::Index j) const;
  ComplexMatrix& block(Eigen::Index i, Eigen::Index j);
  /// np x np matrix with block (i, j) at rows i*p.., cols j*p..
  ComplexMatrix flatten() const;
  /// max_ij |blocks[i][j] - blocks[j][i]^dagger|.
  double hermitian_block_deviation() const;

 private:
  Eigen::Index n_;
  Eigen::Index p_;
  std::vector<ComplexMatrix> blocks_;
};

BlockGram gram(const KernelChoice& k, const std::vector<DensityMatrix>& data);

struct PsdReport {
  double min_eigenvalue = 0.0;
  /// min over probes of Re(y^dagger G y) / |y|^2.
  double min_quadratic_form = 0.0;
  double hermitian_deviation = 0.0;
  bool violation = false;
};

/// Probes are concatenated output vectors (y_1, ..., y_n), length n*p each.
PsdReport validate_psd(const BlockGram& g, const std::vector<ComplexVector>& probes,
                       const Tolerance& tol = kDefaultTolerance);

std::vector<ComplexVector> random_probes(Eigen::Index n, Eigen::Index p, std::size_t count, Rng& rng);

nlohmann::json kernel_spec_to_json(const OVKernelSpec& spec);
OVKernelSpec kernel_spec_from_json(const nlohmann::json& j);
nlohmann::json kernel_choice_to_json(const KernelChoice& k);
KernelChoice kernel_choice_from_json(const nlohmann::json& j);

}  // namespace qovk
