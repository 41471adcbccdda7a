#pragma once

// Exact density-matrix simulation of the swap-test circuits.
//
// Registers are laid out left to right in the order they are listed; the
// first qubit of the first register is the most significant bit of the
// global index. The kernel circuit uses the order a, Z, X, Y.

#include <string>
#include <vector>

#include "qovk/clinalg.hpp"
#include "qovk/qstates.hpp"

namespace qovk::circuit {

inline constexpr int kMaxQubits = 12;

struct Register {
  std::string name;
  int qubits = 1;
};

class Layout {
 public:
  explicit Layout(std::vector<Register> registers);

  const std::vector<Register>& registers() const noexcept { return registers_; }
  int total_qubits() const noexcept { return total_; }
  Eigen::Index dim() const noexcept { return Eigen::Index{1} << total_; }
  std::size_t index_of(const std::string& name) const;
  const Register& reg(const std::string& name) const { return registers_[index_of(name)]; }
  /// Global qubit indices of a register, most significant first.
  std::vector<int> qubits_of(const std::string& name) const;
  Layout without(const std::string& name) const;

 private:
  std::vector<Register> registers_;
  int total_ = 0;
};

struct CircuitState {
  ComplexMatrix rho;
  Layout layout;
};

/// Product state of per-register pure states, in layout order.
CircuitState product_state(const Layout& layout, const std::vector<PureState>& parts);

/// rho <- G rho G^dagger with G acting on `targets` (first target = most
/// significant bit of the gate index).
CircuitState apply_gate(const CircuitState& s, const ComplexMatrix& gate,
                        const std::vector<int>& targets, const Tolerance& tol = kDefaultTolerance);
/// Targets are the concatenated qubits of the listed registers.
CircuitState apply_gate(const CircuitState& s, const ComplexMatrix& gate,
                        const std::vector<std::string>& registers,
                        const Tolerance& tol = kDefaultTolerance);

CircuitState trace_out(const CircuitState& s, const std::string& reg);
CircuitState permute_registers(const CircuitState& s, const std::vector<std::string>& order);

/// Probability of finding `reg` in computational basis state `outcome`.
double outcome_probability(const CircuitState& s, const std::string& reg, Eigen::Index outcome = 0);

struct MeasurementOutcome {
  double probability = 0.0;
  CircuitState post_state;
};

/// Project `reg` on |outcome>, discard it and renormalize.
MeasurementOutcome measure_postselect(const CircuitState& s, const std::string& reg,
                                      Eigen::Index outcome = 0);

/// Controlled swap of two equal registers of `qubits` qubits each; gate index
/// order is (control, first register, second register).
ComplexMatrix cswap(int qubits);

/// 2 P(|0>_a) - 1 from the Hadamard / CSWAP / Hadamard circuit.
double run_scalar_swap_test(const PureState& psi_x, const PureState& psi_z);

/// Every intermediate of the operator-valued kernel circuit.
struct OvkCircuitRun {
  CircuitState psi1;
  CircuitState psi2;
  CircuitState psi3;
  CircuitState psi4;
  double p0 = 0.0;
  CircuitState eta1;       // registers Z, X, Y
  ComplexMatrix sigma;     // register X
  ComplexMatrix eta2;      // Y (x) X ordering
  ComplexMatrix kernel;    // register Y
};

/// u acts on Y (x) X with Y first and must have side 2^(t+s).
OvkCircuitRun run_ovk_circuit(const PureState& psi_x, const PureState& psi_z,
                              const PureState& phi_y, const ComplexMatrix& u);

struct ShotResult {
  long zeros = 0;
  long shots = 0;
  double frequency = 0.0;
};

/// Bernoulli sampling of the |0> outcome of `reg`.
ShotResult sample_shots(const CircuitState& s, const std::string& reg, long shots, Rng& rng);

/// Hand-expanded expressions for each stage of the kernel circuit.
namespace closed_form {

ComplexMatrix psi2(const PureState& psi_x, const PureState& psi_z, const PureState& phi);
ComplexMatrix psi3(const PureState& psi_x, const PureState& psi_z, const PureState& phi);
ComplexMatrix psi4(const PureState& psi_x, const PureState& psi_z, const PureState& phi);
double p0(const PureState& psi_x, const PureState& psi_z);
ComplexMatrix eta1(const PureState& psi_x, const PureState& psi_z, const PureState& phi);
ComplexMatrix sigma(const PureState& psi_x, const PureState& psi_z);
ComplexMatrix eta2(const PureState& psi_x, const PureState& psi_z, const PureState& phi,
                   const ComplexMatrix& u);
ComplexMatrix kernel(const PureState& psi_x, const PureState& psi_z, const PureState& phi,
                     const ComplexMatrix& u);

}  // namespace closed_form

struct VerificationReport {
  int instances = 0;
  /// Stage name -> max elementwise deviation over all instances, in circuit order.
  std::vector<std::pair<std::string, double>> max_deviation;
  double max_probability_deviation = 0.0;
  bool all_states_valid = true;
  double worst() const;
};

/// Random (psi_x, psi_z, phi, U) instances with t-qubit inputs and s-qubit output.
VerificationReport verify_kernel_circuit(int instances, int t, int s, Rng& rng);

nlohmann::json report_to_json(const VerificationReport& r);

}  // namespace qovk::circuit
