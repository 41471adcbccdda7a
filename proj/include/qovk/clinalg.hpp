#pragma once

// Dense complex linear algebra shared by every other module.
//
// Tensor ordering: the left factor of a Kronecker product owns the most
// significant index block, i.e. (A (x) B)[i*rows(B)+k, j*cols(B)+l] =
// A[i,j] B[k,l]. Multi-register states follow the same rule: the first
// register listed is the leftmost ket factor.

#include <complex>
#include <cstddef>
#include <random>
#include <utility>

#include <Eigen/Dense>
#include "json.hpp"

#include "qovk/error.hpp"

namespace qovk {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Caller-owned random engine; every stochastic routine takes one by reference.
using Rng = std::mt19937_64;

struct Tolerance {
  double eps_structural = 1e-9;
  double eps_psd = 1e-8;
};

inline constexpr Tolerance kDefaultTolerance{};

/// Largest side length any constructed matrix may have.
inline constexpr Eigen::Index kMaxDimension = 4096;

enum class Keep { First, Second };

struct SubsystemDims {
  Eigen::Index first;
  Eigen::Index second;
};

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix dagger(const ComplexMatrix& a);

/// Trace out one factor of a bipartite operator of side dims.first*dims.second.
ComplexMatrix partial_trace(const ComplexMatrix& m, SubsystemDims dims, Keep keep);

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of diag(R) absorbed into Q.
ComplexMatrix haar_random_unitary(Eigen::Index dim, Rng& rng);

/// dim x cols matrix of i.i.d. standard complex Gaussians (real and imaginary
/// parts each N(0, 1/2)).
ComplexMatrix complex_ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Solve a x = b for Hermitian positive-definite a (Cholesky).
/// Throws SingularityError with the minimum eigenvalue when a is not pd.
ComplexMatrix solve_hermitian(const ComplexMatrix& a, const ComplexMatrix& b,
                              const Tolerance& tol = kDefaultTolerance);

double frobenius_norm(const ComplexMatrix& a);

/// Ascending eigenvalues of a Hermitian matrix.
RealVector hermitian_eigenvalues(const ComplexMatrix& a,
                                 const Tolerance& tol = kDefaultTolerance);
double min_eigenvalue_hermitian(const ComplexMatrix& a,
                                const Tolerance& tol = kDefaultTolerance);

bool is_square(const ComplexMatrix& a);
bool is_finite(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, const Tolerance& tol = kDefaultTolerance);
bool is_unitary(const ComplexMatrix& a, const Tolerance& tol = kDefaultTolerance);
bool is_density(const ComplexMatrix& a, const Tolerance& tol = kDefaultTolerance);

/// Largest absolute entrywise difference; shapes must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Side length as a power of two, or -1 when it is not one.
int log2_dim(Eigen::Index dim);

// Pauli matrices in the order I, X, Y, Z.
ComplexMatrix pauli(int index);

ComplexMatrix hadamard();

// {"rows", "cols", "re", "im"} with row-major entry arrays.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

}  // namespace qovk
