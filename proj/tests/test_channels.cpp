#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qovk/channels.hpp"
#include "qovk/error.hpp"

using namespace qovk;

namespace {

ComplexMatrix kraus_sum(const QuantumChannel& ch) {
  const auto& ops = std::get<KrausRep>(ch.rep()).ops;
  ComplexMatrix s = ComplexMatrix::Zero(ch.in_dim(), ch.in_dim());
  for (const auto& a : ops) s += a.adjoint() * a;
  return s;
}

QuantumChannel random_kraus_channel(Eigen::Index a, Eigen::Index b, int rank, Rng& rng) {
  // Stinespring: isometry V (b*rank x a) sliced into Kraus blocks.
  const ComplexMatrix u = haar_random_unitary(b * rank, rng);
  std::vector<ComplexMatrix> ops;
  for (int r = 0; r < rank; ++r) ops.push_back(u.block(r * b, 0, b, a));
  return QuantumChannel::from_kraus(ops);
}

ComplexMatrix identity_choi() {
  ComplexMatrix c = ComplexMatrix::Zero(4, 4);
  c(0, 0) = c(0, 3) = c(3, 0) = c(3, 3) = 1.0;
  return c;
}

}  // namespace

TEST(Apply, IdentityAndTrivialPauli) {
  Rng rng(70);
  const DensityMatrix rho = random_density(2, 2, rng);
  EXPECT_LT(max_abs_diff(apply(QuantumChannel::identity(2), rho).matrix(), rho.matrix()), 1e-15);
  const auto ch = pauli_channel(PauliChannelSpec({1.0, 0.0, 0.0, 0.0}));
  EXPECT_LT(max_abs_diff(apply(ch, rho).matrix(), rho.matrix()), 1e-15);
}

TEST(Apply, KrausAndChoiAgree) {
  Rng rng(71);
  for (int k = 0; k < 20; ++k) {
    const auto ch = random_kraus_channel(2, 3, 2, rng);
    const auto via_choi = from_choi(to_choi(ch), 2, 3);
    const DensityMatrix rho = random_density(2, 2, rng);
    EXPECT_LT(max_abs_diff(apply(ch, rho).matrix(), apply(via_choi, rho).matrix()), 1e-10);
  }
}

TEST(Apply, PreservesTraceAndPositivity) {
  Rng rng(72);
  for (int k = 0; k < 100; ++k) {
    const auto ch = random_pauli_channel(k % 2 ? 2 : 4, rng);
    const DensityMatrix out = apply(ch, random_density(ch.in_dim(), 1 + k % 2, rng));
    EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-12);
    EXPECT_GE(min_eigenvalue_hermitian(out.matrix()), -1e-12);
  }
  EXPECT_THROW(apply(QuantumChannel::identity(2), DensityMatrix::maximally_mixed(4)), ShapeError);
}

TEST(PauliChannel, TracePreservingUnitalReproducible) {
  Rng rng(73);
  for (Eigen::Index d : {2, 4}) {
    for (int k = 0; k < 20; ++k) {
      const auto ch = random_pauli_channel(d, rng);
      EXPECT_LT(max_abs_diff(kraus_sum(ch), ComplexMatrix::Identity(d, d)), 1e-12);
      const auto mixed = DensityMatrix::maximally_mixed(d);
      EXPECT_LT(max_abs_diff(apply(ch, mixed).matrix(), mixed.matrix()), 1e-14);
      EXPECT_GE(min_eigenvalue_hermitian(to_choi(ch)), -1e-8);
    }
  }
  Rng a(9), b(9);
  EXPECT_EQ(random_pauli_spec(2, a).probabilities(), random_pauli_spec(2, b).probabilities());
}

TEST(PauliChannel, SpecValidation) {
  EXPECT_THROW(PauliChannelSpec({0.5, 0.5, 0.1, -0.1}), DomainError);
  EXPECT_THROW(PauliChannelSpec({0.5, 0.5, 0.1}), ShapeError);
  EXPECT_THROW(PauliChannelSpec({0.5, 0.5, 0.1, 0.0}), DomainError);
  Rng rng(74);
  const auto s = random_pauli_spec(4, rng);
  double sum = 0.0;
  for (double p : s.probabilities()) {
    EXPECT_GE(p, 0.0);
    sum += p;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_EQ(s.dim(), 4);
}

TEST(PauliChannel, MatchesTermwiseSum) {
  Rng rng(75);
  const auto spec = random_pauli_spec(2, rng);
  const auto ch = pauli_channel(spec);
  const auto p = oracle::paulis();
  const DensityMatrix rho = random_density(2, 2, rng);
  ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
  for (int i = 0; i < 4; ++i) expected += spec.probabilities()[i] * p[i] * rho.matrix() * p[i];
  EXPECT_LT(max_abs_diff(apply(ch, rho).matrix(), expected), 1e-14);
}

TEST(Depolarize, EndpointsAndFixedPoint) {
  Rng rng(76);
  const DensityMatrix rho = random_density(4, 4, rng);
  EXPECT_LT(max_abs_diff(depolarize(rho, 0.0).matrix(), rho.matrix()), 1e-15);
  const auto mixed = DensityMatrix::maximally_mixed(4);
  EXPECT_LT(max_abs_diff(depolarize(rho, 1.0).matrix(), mixed.matrix()), 1e-15);
  EXPECT_LT(max_abs_diff(depolarize(mixed, 0.37).matrix(), mixed.matrix()), 1e-15);
  EXPECT_THROW(depolarize(rho, 1.5), DomainError);
  EXPECT_THROW(depolarize(rho, -0.1), DomainError);
}

TEST(Depolarize, ContractionIdentityAndLinearity) {
  Rng rng(77);
  for (int k = 0; k < 100; ++k) {
    const DensityMatrix rho = random_density(2, 1 + k % 2, rng);
    const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const ComplexMatrix mixed = 0.5 * ComplexMatrix::Identity(2, 2);
    EXPECT_NEAR((depolarize(rho, lambda).matrix() - mixed).norm(), (1 - lambda) * (rho.matrix() - mixed).norm(),
                1e-12);
    const DensityMatrix sigma = random_density(2, 2, rng);
    const ComplexMatrix mix = 0.3 * rho.matrix() + 0.7 * sigma.matrix();
    EXPECT_LT(max_abs_diff(depolarize_linear(mix, lambda),
                           0.3 * depolarize(rho, lambda).matrix() + 0.7 * depolarize(sigma, lambda).matrix()),
              1e-14);
  }
}

TEST(Choi, KnownMatrices) {
  EXPECT_LT(max_abs_diff(to_choi(QuantumChannel::identity(2)), identity_choi()), 1e-15);
  const auto full = pauli_channel(PauliChannelSpec({0.25, 0.25, 0.25, 0.25}));
  EXPECT_LT(max_abs_diff(to_choi(full), 0.5 * ComplexMatrix::Identity(4, 4)), 1e-15);
}

TEST(Choi, RoundTrips) {
  Rng rng(78);
  for (int k = 0; k < 20; ++k) {
    const auto ch = random_pauli_channel(2, rng);
    const ComplexMatrix c = to_choi(ch);
    EXPECT_LT(max_abs_diff(to_choi(from_choi(c, 2, 2)), c), 1e-10);
    const auto rect = random_kraus_channel(2, 3, 3, rng);
    EXPECT_LT(max_abs_diff(to_choi(from_choi(to_choi(rect), 2, 3)), to_choi(rect)), 1e-10);
  }
}

TEST(Choi, RejectsInvalidMatrices) {
  EXPECT_THROW(from_choi(ComplexMatrix::Identity(4, 4), 2, 2), ValidityError);
  ComplexMatrix neg = identity_choi();
  neg(0, 0) = -1.0;
  EXPECT_THROW(from_choi(neg, 2, 2), ValidityError);
  const auto v = check_choi(ComplexMatrix::Identity(4, 4), 2, 2);
  EXPECT_FALSE(v.valid);
  EXPECT_NEAR(v.trace_preservation_deviation, 1.0, 1e-15);
}

TEST(Kraus, RejectsNonTracePreserving) {
  EXPECT_THROW(QuantumChannel::from_kraus({2.0 * ComplexMatrix::Identity(2, 2)}), ValidityError);
}

TEST(Reconstruct, ExactPredictorRecoversChoi) {
  Rng rng(79);
  for (int k = 0; k < 20; ++k) {
    const auto ch = random_pauli_channel(2, rng);
    const auto cand = reconstruct_channel([&](const DensityMatrix& r) { return apply(ch, r).matrix(); }, 2);
    EXPECT_LT(max_abs_diff(cand.choi, to_choi(ch)), 1e-8);
    EXPECT_TRUE(cand.validity.valid);
  }
  const auto ch4 = random_pauli_channel(4, rng);
  const auto c4 = reconstruct_channel([&](const DensityMatrix& r) { return apply(ch4, r).matrix(); }, 4);
  EXPECT_LT(max_abs_diff(c4.choi, to_choi(ch4)), 1e-8);
}

TEST(Reconstruct, ConstantPredictor) {
  const auto cand = reconstruct_channel([](const DensityMatrix&) { return ComplexMatrix(0.5 * ComplexMatrix::Identity(2, 2)); }, 2);
  // A constant map sends |i><j| to Tr(|i><j|) I/2.
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i) expected.block(2 * i, 2 * i, 2, 2) = 0.5 * ComplexMatrix::Identity(2, 2);
  EXPECT_LT(max_abs_diff(cand.choi, expected), 1e-12);
}

TEST(Reconstruct, WellConditionedUnderPerturbation) {
  Rng rng(80);
  const auto ch = random_pauli_channel(2, rng);
  const ComplexMatrix noise = 1e-6 * complex_ginibre(2, 2, rng);
  const auto cand =
      reconstruct_channel([&](const DensityMatrix& r) { return ComplexMatrix(apply(ch, r).matrix() + noise); }, 2);
  EXPECT_LT((cand.choi - to_choi(ch)).norm(), 1e-4);
}

TEST(RecoveryError, KnownValuesAndSymmetry) {
  const auto id = QuantumChannel::identity(2);
  EXPECT_NEAR(recovery_error(id, as_candidate(id)), 0.0, 1e-15);
  const auto full = pauli_channel(PauliChannelSpec({0.25, 0.25, 0.25, 0.25}));
  EXPECT_NEAR(recovery_error(id, as_candidate(full)), std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(recovery_error(as_candidate(full), as_candidate(id)),
              recovery_error(as_candidate(id), as_candidate(full)), 1e-15);
  EXPECT_THROW(recovery_error(id, as_candidate(QuantumChannel::identity(4))), ShapeError);
}

TEST(ChannelJson, RoundTrip) {
  Rng rng(81);
  const auto ch = random_pauli_channel(2, rng);
  const auto back = channel_from_json(nlohmann::json::parse(channel_to_json(ch).dump()));
  EXPECT_LT(max_abs_diff(to_choi(back), to_choi(ch)), 1e-15);
  const auto choi_ch = from_choi(to_choi(ch), 2, 2);
  EXPECT_EQ(channel_to_json(choi_ch)["rep"], "choi");
  EXPECT_LT(max_abs_diff(to_choi(channel_from_json(channel_to_json(choi_ch))), to_choi(ch)), 1e-15);
}
