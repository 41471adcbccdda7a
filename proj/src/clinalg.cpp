#include "qovk/clinalg.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace qovk {

namespace {

std::string shape_str(const ComplexMatrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void require_hermitian(const ComplexMatrix& a, const Tolerance& tol, const char* op) {
  if (!is_hermitian(a, tol)) {
    throw DomainError(std::string(op) + ": input " + shape_str(a) +
                      " is not Hermitian within tolerance");
  }
}

}  // namespace

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > kMaxDimension || cols > kMaxDimension) {
    throw SizeError("tensor: result " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " exceeds maximum dimension " + std::to_string(kMaxDimension));
  }
  ComplexMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix dagger(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix partial_trace(const ComplexMatrix& m, SubsystemDims dims, Keep keep) {
  const Eigen::Index da = dims.first;
  const Eigen::Index db = dims.second;
  if (da < 1 || db < 1 || m.rows() != da * db || m.cols() != da * db) {
    throw ShapeError("partial_trace: matrix " + shape_str(m) + " does not factor as " +
                     std::to_string(da) + "*" + std::to_string(db));
  }
  if (keep == Keep::First) {
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (Eigen::Index i = 0; i < da; ++i)
      for (Eigen::Index j = 0; j < da; ++j)
        out(i, j) = m.block(i * db, j * db, db, db).trace();
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Eigen::Index i = 0; i < da; ++i) out += m.block(i * db, i * db, db, db);
  return out;
}

ComplexMatrix complex_ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix g(rows, cols);
  // Fill row-major so the draw order does not depend on Eigen's storage order.
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

ComplexMatrix haar_random_unitary(Eigen::Index dim, Rng& rng) {
  if (dim < 1) throw DomainError("haar_random_unitary: dim must be >= 1");
  if (dim > kMaxDimension) throw SizeError("haar_random_unitary: dim exceeds maximum");
  const ComplexMatrix g = complex_ginibre(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double mag = std::abs(r(k, k));
    const Complex phase = mag > 0.0 ? r(k, k) / mag : Complex(1.0, 0.0);
    q.col(k) *= phase;
  }
  return q;
}

ComplexMatrix solve_hermitian(const ComplexMatrix& a, const ComplexMatrix& b,
                              const Tolerance& tol) {
  if (!is_square(a) || a.rows() != b.rows()) {
    throw ShapeError("solve_hermitian: system " + shape_str(a) + " with rhs " + shape_str(b));
  }
  require_hermitian(a, tol, "solve_hermitian");
  const ComplexMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::LLT<ComplexMatrix> llt(sym);
  if (llt.info() == Eigen::Success) {
    ComplexMatrix x = llt.solve(b);
    if (x.allFinite()) return x;
  }
  const double lambda_min = min_eigenvalue_hermitian(sym, tol);
  std::ostringstream os;
  os << "solve_hermitian: matrix is not positive definite (min eigenvalue " << lambda_min << ")";
  throw SingularityError(os.str(), lambda_min);
}

double frobenius_norm(const ComplexMatrix& a) { return a.norm(); }

RealVector hermitian_eigenvalues(const ComplexMatrix& a, const Tolerance& tol) {
  if (!is_square(a)) throw ShapeError("hermitian_eigenvalues: non-square input " + shape_str(a));
  require_hermitian(a, tol, "hermitian_eigenvalues");
  const ComplexMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue_hermitian(const ComplexMatrix& a, const Tolerance& tol) {
  return hermitian_eigenvalues(a, tol).minCoeff();
}

bool is_square(const ComplexMatrix& a) { return a.rows() == a.cols() && a.rows() > 0; }

bool is_finite(const ComplexMatrix& a) { return a.allFinite(); }

bool is_hermitian(const ComplexMatrix& a, const Tolerance& tol) {
  if (!is_square(a) || !is_finite(a)) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol.eps_structural;
}

bool is_unitary(const ComplexMatrix& a, const Tolerance& tol) {
  if (!is_square(a) || !is_finite(a)) return false;
  const ComplexMatrix id = ComplexMatrix::Identity(a.rows(), a.cols());
  return (a.adjoint() * a - id).cwiseAbs().maxCoeff() <= tol.eps_structural;
}

bool is_density(const ComplexMatrix& a, const Tolerance& tol) {
  if (!is_hermitian(a, tol)) return false;
  if (std::abs(a.trace() - Complex(1.0, 0.0)) > tol.eps_structural) return false;
  return min_eigenvalue_hermitian(a, tol) >= -tol.eps_psd;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("max_abs_diff: shapes " + shape_str(a) + " and " + shape_str(b));
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

int log2_dim(Eigen::Index dim) {
  if (dim < 1) return -1;
  int bits = 0;
  while ((Eigen::Index{1} << bits) < dim) ++bits;
  return (Eigen::Index{1} << bits) == dim ? bits : -1;
}

ComplexMatrix pauli(int index) {
  ComplexMatrix s(2, 2);
  const Complex i(0.0, 1.0);
  switch (index) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -i, i, 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw DomainError("pauli: index must be in 0..3");
  }
  return s;
}

ComplexMatrix hadamard() {
  ComplexMatrix h(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  h << r, r, r, -r;
  return h;
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  std::vector<double> re;
  std::vector<double> im;
  re.reserve(static_cast<std::size_t>(m.size()));
  im.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (rows < 1 || cols < 1) throw ShapeError("matrix_from_json: dimensions must be positive");
  const auto n = static_cast<std::size_t>(rows * cols);
  if (re.size() != n || im.size() != n) {
    throw ShapeError("matrix_from_json: expected " + std::to_string(n) + " entries");
  }
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) {
      const auto k = static_cast<std::size_t>(i * cols + j2);
      m(i, j2) = Complex(re[k], im[k]);
    }
  if (!m.allFinite()) throw DomainError("matrix_from_json: non-finite entry");
  return m;
}

}  // namespace qovk
