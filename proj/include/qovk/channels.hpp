#pragma once

// Quantum channels in Kraus or Choi form.
//
// Choi convention: C = sum_ij |i><j| (x) Phi(|i><j|), input factor first,
// unnormalized. Under it Phi(rho) = Tr_in[C (rho^T (x) I_b)].

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "qovk/clinalg.hpp"
#include "qovk/qstates.hpp"

namespace qovk {

struct KrausRep {
  std::vector<ComplexMatrix> ops;  // each b x a
};

struct ChoiRep {
  ComplexMatrix matrix;  // ab x ab
};

class QuantumChannel {
 public:
  /// Validates trace preservation: sum_i A_i^dagger A_i = I_a.
  static QuantumChannel from_kraus(std::vector<ComplexMatrix> ops,
                                   const Tolerance& tol = kDefaultTolerance);
  /// Validates psd and Tr_out C = I_a.
  static QuantumChannel from_choi(ComplexMatrix choi, Eigen::Index a, Eigen::Index b,
                                  const Tolerance& tol = kDefaultTolerance);
  static QuantumChannel identity(Eigen::Index dim);

  Eigen::Index in_dim() const noexcept { return a_; }
  Eigen::Index out_dim() const noexcept { return b_; }
  const std::variant<KrausRep, ChoiRep>& rep() const noexcept { return rep_; }
  bool is_kraus() const noexcept { return std::holds_alternative<KrausRep>(rep_); }

 private:
  QuantumChannel(std::variant<KrausRep, ChoiRep> rep, Eigen::Index a, Eigen::Index b)
      : rep_(std::move(rep)), a_(a), b_(b) {}

  std::variant<KrausRep, ChoiRep> rep_;
  Eigen::Index a_;
  Eigen::Index b_;
};

/// Probability vector over the Pauli basis (4 for one qubit, 16 for two).
class PauliChannelSpec {
 public:
  explicit PauliChannelSpec(std::vector<double> probabilities);
  const std::vector<double>& probabilities() const noexcept { return probs_; }
  Eigen::Index dim() const noexcept { return probs_.size() == 4 ? 2 : 4; }

 private:
  std::vector<double> probs_;
};

/// Linear action on an arbitrary a x a operator (no validity checks on x).
ComplexMatrix apply_linear(const QuantumChannel& ch, const ComplexMatrix& x);
DensityMatrix apply(const QuantumChannel& ch, const DensityMatrix& rho);

/// Paulis in order I, X, Y, Z (one qubit) or P_j (x) P_k with index 4j+k (two qubits).
std::vector<ComplexMatrix> pauli_basis(Eigen::Index dim);

QuantumChannel pauli_channel(const PauliChannelSpec& spec);
/// Probabilities drawn from the flat Dirichlet over the simplex.
PauliChannelSpec random_pauli_spec(Eigen::Index p_dim, Rng& rng);
QuantumChannel random_pauli_channel(Eigen::Index p_dim, Rng& rng);

/// (1 - lambda) rho + (lambda / p) I.
DensityMatrix depolarize(const DensityMatrix& rho, double lambda);
ComplexMatrix depolarize_linear(const ComplexMatrix& x, double lambda);

ComplexMatrix to_choi(const QuantumChannel& ch);
QuantumChannel from_choi(const ComplexMatrix& m, Eigen::Index a, Eigen::Index b,
                         const Tolerance& tol = kDefaultTolerance);

struct ChoiValidity {
  double min_eigenvalue = 0.0;
  /// max |Tr_out C - I_a|
  double trace_preservation_deviation = 0.0;
  double hermitian_deviation = 0.0;
  bool valid = false;
};

ChoiValidity check_choi(const ComplexMatrix& m, Eigen::Index a, Eigen::Index b,
                        const Tolerance& tol = kDefaultTolerance);

/// Choi matrix estimated from a black-box predictor; not projected to CPTP.
struct ChannelCandidate {
  ComplexMatrix choi;
  Eigen::Index a = 0;
  Eigen::Index b = 0;
  ChoiValidity validity;
};

using Predictor = std::function<ComplexMatrix(const DensityMatrix&)>;

/// Per-qubit probes |0><0|, |1><1|, |+><+|, |+i><+i|, tensor-expanded.
std::vector<DensityMatrix> tomography_probes(Eigen::Index a);

/// Linear tomography on the canonical probe set.
ChannelCandidate reconstruct_channel(const Predictor& predictor, Eigen::Index a);

ChannelCandidate as_candidate(const QuantumChannel& ch);
/// ||Choi_true - Choi_learned||_F.
double recovery_error(const QuantumChannel& truth, const ChannelCandidate& learned);
double recovery_error(const ChannelCandidate& x, const ChannelCandidate& y);

nlohmann::json channel_to_json(const QuantumChannel& ch);
QuantumChannel channel_from_json(const nlohmann::json& j);

}  // namespace qovk
