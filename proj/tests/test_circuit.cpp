#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qovk/circuit.hpp"
#include "qovk/error.hpp"
#include "qovk/qkernels.hpp"

using namespace qovk;
using namespace qovk::circuit;

namespace {

PureState plus_state() {
  ComplexVector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return PureState{v};
}

/// Statevector of the swap-test register block a, Z, X, Y after H, CSWAP, H,
/// computed with explicit basis-index bookkeeping.
ComplexVector swap_test_statevector(const PureState& x, const PureState& z, const PureState& phi) {
  const Eigen::Index d = x.dim(), dy = phi.dim();
  const ComplexMatrix psi1 = oracle::kron(oracle::kron(oracle::kron(PureState::basis(2, 0).amplitudes(),
                                                                    z.amplitudes()),
                                                       x.amplitudes()),
                                          phi.amplitudes());
  const Eigen::Index block = d * d * dy;
  ComplexMatrix h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  const ComplexMatrix hfull = oracle::kron(h, ComplexMatrix::Identity(block, block));
  ComplexMatrix cswap = ComplexMatrix::Zero(2 * block, 2 * block);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < dy; ++k) {
        const Eigen::Index in = (i * d + j) * dy + k;
        cswap(in, in) = 1.0;
        cswap(block + (j * d + i) * dy + k, block + in) = 1.0;
      }
  return hfull * cswap * hfull * psi1;
}

}  // namespace

TEST(Layout, IndexingAndCap) {
  const Layout l({{"a", 1}, {"Z", 2}, {"X", 2}, {"Y", 1}});
  EXPECT_EQ(l.total_qubits(), 6);
  EXPECT_EQ(l.dim(), 64);
  EXPECT_EQ(l.qubits_of("X"), (std::vector<int>{3, 4}));
  EXPECT_EQ(l.without("Z").total_qubits(), 4);
  EXPECT_THROW(Layout({{"a", 7}, {"b", 6}}), SizeError);
  EXPECT_THROW(Layout({{"a", 0}}), DomainError);
}

TEST(ApplyGate, HadamardOnZero) {
  const Layout l({{"a", 1}});
  const auto s = apply_gate(product_state(l, {PureState::basis(2, 0)}), hadamard(), std::vector<std::string>{"a"});
  const ComplexVector plus = plus_state().amplitudes();
  EXPECT_LT(max_abs_diff(s.rho, plus * plus.adjoint()), 1e-15);
}

TEST(ApplyGate, RejectsNonUnitaryAndBadSelector) {
  const Layout l({{"a", 1}, {"Y", 1}});
  const auto s = product_state(l, {PureState::basis(2, 0), PureState::basis(2, 0)});
  EXPECT_THROW(apply_gate(s, 2.0 * hadamard(), std::vector<int>{0}), DomainError);
  EXPECT_THROW(apply_gate(s, hadamard(), std::vector<int>{0, 1}), ShapeError);
  EXPECT_THROW(apply_gate(s, hadamard(), std::vector<int>{5}), ShapeError);
}

TEST(ApplyGate, TargetsNonAdjacentQubits) {
  // CNOT with control 0 and target 2 on |1>|0>|0> gives |1>|0>|1>.
  const Layout l({{"q0", 1}, {"q1", 1}, {"q2", 1}});
  const auto s = product_state(l, {PureState::basis(2, 1), PureState::basis(2, 0), PureState::basis(2, 0)});
  const auto out = apply_gate(s, cnot(2, 0, 1), std::vector<int>{0, 2});
  EXPECT_NEAR(out.rho(5, 5).real(), 1.0, 1e-15);
}

TEST(Cswap, ControlZeroAndOne) {
  Rng rng(50);
  const PureState z = random_pure_state(2, rng), x = random_pure_state(2, rng);
  const Layout l({{"a", 1}, {"Z", 1}, {"X", 1}});
  const auto off = apply_gate(product_state(l, {PureState::basis(2, 0), z, x}), cswap(1),
                              std::vector<std::string>{"a", "Z", "X"});
  EXPECT_LT(max_abs_diff(off.rho, product_state(l, {PureState::basis(2, 0), z, x}).rho), 1e-15);
  const auto on = apply_gate(product_state(l, {PureState::basis(2, 1), z, x}), cswap(1),
                             std::vector<std::string>{"a", "Z", "X"});
  EXPECT_LT(max_abs_diff(on.rho, product_state(l, {PureState::basis(2, 1), x, z}).rho), 1e-15);
}

TEST(Measure, SwapTestProbabilities) {
  EXPECT_NEAR(closed_form::p0(PureState::basis(2, 0), PureState::basis(2, 0)), 1.0, 1e-15);
  const PureState zero = PureState::basis(2, 0);
  const PureState phi = PureState::basis(2, 0);
  const auto u = ComplexMatrix::Identity(4, 4);
  EXPECT_NEAR(run_ovk_circuit(zero, zero, phi, u).p0, 1.0, 1e-12);
  EXPECT_NEAR(run_ovk_circuit(zero, PureState::basis(2, 1), phi, u).p0, 0.5, 1e-12);
  EXPECT_NEAR(run_ovk_circuit(zero, plus_state(), phi, u).p0, 0.75, 1e-12);
}

TEST(Measure, PostselectionImpossibleIsReported) {
  const Layout l({{"a", 1}, {"Y", 1}});
  const auto s = product_state(l, {PureState::basis(2, 1), PureState::basis(2, 0)});
  EXPECT_THROW(measure_postselect(s, "a", 0), PostselectionError);
  const auto m = measure_postselect(s, "a", 1);
  EXPECT_NEAR(m.probability, 1.0, 1e-15);
  EXPECT_EQ(m.post_state.layout.total_qubits(), 1);
}

TEST(SwapTest, MatchesInnerProductOracle) {
  EXPECT_NEAR(run_scalar_swap_test(PureState::basis(2, 0), PureState::basis(2, 0)), 1.0, 1e-12);
  EXPECT_NEAR(run_scalar_swap_test(PureState::basis(2, 0), PureState::basis(2, 1)), 0.0, 1e-12);
  Rng rng(51);
  for (int k = 0; k < 100; ++k) {
    const PureState x = random_pure_state(4, rng), z = random_pure_state(4, rng);
    const double overlap = std::norm(x.amplitudes().dot(z.amplitudes()));
    EXPECT_NEAR(run_scalar_swap_test(x, z), overlap, 1e-10);
    EXPECT_NEAR(run_scalar_swap_test(x, z), scalar_kernel(to_density(x), to_density(z)), 1e-10);
  }
}

TEST(OvkCircuit, Psi4MatchesStatevectorOracle) {
  Rng rng(52);
  for (int k = 0; k < 10; ++k) {
    const PureState x = random_pure_state(2, rng), z = random_pure_state(2, rng), phi = random_pure_state(2, rng);
    const auto run = run_ovk_circuit(x, z, phi, haar_random_unitary(4, rng));
    const ComplexVector v = swap_test_statevector(x, z, phi);
    EXPECT_LT(max_abs_diff(run.psi4.rho, v * v.adjoint()), 1e-12);
    EXPECT_NEAR(run.p0, 0.5 + 0.5 * std::norm(x.amplitudes().dot(z.amplitudes())), 1e-12);
  }
}

TEST(OvkCircuit, SeparableCouplingYieldsPhi) {
  Rng rng(53);
  for (int k = 0; k < 10; ++k) {
    const PureState x = random_pure_state(2, rng), z = random_pure_state(2, rng), phi = random_pure_state(2, rng);
    const ComplexMatrix u = tensor(ComplexMatrix::Identity(2, 2), haar_random_unitary(2, rng));
    const auto run = run_ovk_circuit(x, z, phi, u);
    EXPECT_LT(max_abs_diff(run.kernel, to_density(phi).matrix()), 1e-12);
  }
}

TEST(OvkCircuit, EqualInputsReduceToDilationOfRhoX) {
  Rng rng(54);
  const PureState x = random_pure_state(2, rng), phi = random_pure_state(2, rng);
  const ComplexMatrix u = haar_random_unitary(4, rng);
  const auto run = run_ovk_circuit(x, x, phi, u);
  EXPECT_LT(max_abs_diff(run.sigma, to_density(x).matrix()), 1e-12);
  EXPECT_LT(max_abs_diff(run.kernel, oracle::dilation_kernel(u, to_density(phi).matrix(), to_density(x).matrix())),
            1e-12);
}

TEST(OvkCircuit, KernelMatchesAnalyticKernel) {
  Rng rng(55);
  for (int k = 0; k < 20; ++k) {
    const PureState x = random_pure_state(2, rng), z = random_pure_state(2, rng), phi = random_pure_state(2, rng);
    const ComplexMatrix u = haar_random_unitary(4, rng);
    const auto run = run_ovk_circuit(x, z, phi, u);
    const auto spec = OVKernelSpec::unitary(FeatureRule::Symmetrized, u, to_density(phi));
    EXPECT_LT(max_abs_diff(run.kernel, eval_ovk(spec, to_density(x), to_density(z))), 1e-10);
    EXPECT_LT(max_abs_diff(run.sigma, feature_matrix(FeatureRule::Symmetrized, to_density(x), to_density(z))), 1e-10);
  }
}

TEST(OvkCircuit, IntermediateStatesAreDensities) {
  Rng rng(56);
  const PureState x = random_pure_state(4, rng), z = random_pure_state(4, rng), phi = random_pure_state(2, rng);
  const auto run = run_ovk_circuit(x, z, phi, haar_random_unitary(8, rng));
  for (const auto* s : {&run.psi1, &run.psi2, &run.psi3, &run.psi4, &run.eta1}) EXPECT_TRUE(is_density(s->rho));
  EXPECT_TRUE(is_density(run.eta2));
  EXPECT_TRUE(is_density(run.kernel));
}

TEST(OvkCircuit, RejectsWrongCouplingSize) {
  Rng rng(57);
  const PureState x = random_pure_state(2, rng);
  EXPECT_THROW(run_ovk_circuit(x, x, x, haar_random_unitary(8, rng)), ShapeError);
}

TEST(Verification, AllStagesWithinTolerance) {
  Rng rng(58);
  const auto rep = verify_kernel_circuit(50, 1, 1, rng);
  EXPECT_EQ(rep.instances, 50);
  EXPECT_EQ(rep.max_deviation.size(), 7u);
  EXPECT_LT(rep.worst(), 1e-10);
  EXPECT_TRUE(rep.all_states_valid);
  Rng rng2(59);
  EXPECT_LT(verify_kernel_circuit(5, 2, 1, rng2).worst(), 1e-10);
}

TEST(Shots, CertainOutcomeAndStatistics) {
  Rng rng(60);
  const Layout l({{"a", 1}});
  const auto certain = sample_shots(product_state(l, {PureState::basis(2, 0)}), "a", 1000, rng);
  EXPECT_EQ(certain.zeros, 1000);
  EXPECT_DOUBLE_EQ(certain.frequency, 1.0);
  const auto half = product_state(l, {plus_state()});
  const auto r = sample_shots(half, "a", 1000000, rng);
  EXPECT_NEAR(r.frequency, 0.5, 0.002);
  Rng a(61), b(61);
  EXPECT_EQ(sample_shots(half, "a", 500, a).zeros, sample_shots(half, "a", 500, b).zeros);
}
