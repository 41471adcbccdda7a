#include "qovk/channels.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace qovk {

namespace {

ComplexMatrix unit(Eigen::Index dim, Eigen::Index i, Eigen::Index j) {
  ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
  e(i, j) = 1.0;
  return e;
}

}  // namespace

QuantumChannel QuantumChannel::from_kraus(std::vector<ComplexMatrix> ops, const Tolerance& tol) {
  if (ops.empty()) throw ValidityError("QuantumChannel: empty Kraus set");
  const Eigen::Index b = ops.front().rows();
  const Eigen::Index a = ops.front().cols();
  ComplexMatrix sum = ComplexMatrix::Zero(a, a);
  for (const auto& op : ops) {
    if (op.rows() != b || op.cols() != a) {
      throw ShapeError("QuantumChannel: Kraus operators must share one shape");
    }
    sum += op.adjoint() * op;
  }
  const double dev = max_abs_diff(sum, ComplexMatrix::Identity(a, a));
  if (dev > tol.eps_structural) {
    std::ostringstream os;
    os << "QuantumChannel: Kraus set is not trace preserving (deviation " << dev << ")";
    throw ValidityError(os.str());
  }
  return QuantumChannel(KrausRep{std::move(ops)}, a, b);
}

QuantumChannel QuantumChannel::from_choi(ComplexMatrix choi, Eigen::Index a, Eigen::Index b,
                                         const Tolerance& tol) {
  const ChoiValidity v = check_choi(choi, a, b, tol);
  if (!v.valid) {
    std::ostringstream os;
    os << "QuantumChannel: invalid Choi matrix (min eigenvalue " << v.min_eigenvalue
       << ", trace-preservation deviation " << v.trace_preservation_deviation
       << ", Hermitian deviation " << v.hermitian_deviation << ")";
    throw ValidityError(os.str());
  }
  return QuantumChannel(ChoiRep{std::move(choi)}, a, b);
}

QuantumChannel QuantumChannel::identity(Eigen::Index dim) {
  return from_kraus({ComplexMatrix::Identity(dim, dim)});
}

PauliChannelSpec::PauliChannelSpec(std::vector<double> probabilities)
    : probs_(std::move(probabilities)) {
  if (probs_.size() != 4 && probs_.size() != 16) {
    throw ShapeError("PauliChannelSpec: need 4 or 16 probabilities");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw DomainError("PauliChannelSpec: probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("PauliChannelSpec: probabilities must sum to 1");
}

ComplexMatrix apply_linear(const QuantumChannel& ch, const ComplexMatrix& x) {
  if (x.rows() != ch.in_dim() || x.cols() != ch.in_dim()) {
    throw ShapeError("apply: operator is " + std::to_string(x.rows()) + "x" +
                     std::to_string(x.cols()) + ", channel input dimension is " +
                     std::to_string(ch.in_dim()));
  }
  if (const auto* k = std::get_if<KrausRep>(&ch.rep())) {
    ComplexMatrix out = ComplexMatrix::Zero(ch.out_dim(), ch.out_dim());
    for (const auto& op : k->ops) out += op * x * op.adjoint();
    return out;
  }
  const auto& c = std::get<ChoiRep>(ch.rep());
  const ComplexMatrix lifted =
      c.matrix * tensor(x.transpose(), ComplexMatrix::Identity(ch.out_dim(), ch.out_dim()));
  return partial_trace(lifted, {ch.in_dim(), ch.out_dim()}, Keep::Second);
}

DensityMatrix apply(const QuantumChannel& ch, const DensityMatrix& rho) {
  ComplexMatrix out = apply_linear(ch, rho.matrix());
  out = 0.5 * (out + out.adjoint());
  return DensityMatrix(std::move(out));
}

std::vector<ComplexMatrix> pauli_basis(Eigen::Index dim) {
  std::vector<ComplexMatrix> basis;
  if (dim == 2) {
    for (int k = 0; k < 4; ++k) basis.push_back(pauli(k));
  } else if (dim == 4) {
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) basis.push_back(tensor(pauli(j), pauli(k)));
  } else {
    throw DomainError("pauli_basis: dimension must be 2 or 4");
  }
  return basis;
}

QuantumChannel pauli_channel(const PauliChannelSpec& spec) {
  const auto basis = pauli_basis(spec.dim());
  std::vector<ComplexMatrix> ops;
  ops.reserve(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) ops.push_back(std::sqrt(spec.probabilities()[i]) * basis[i]);
  return QuantumChannel::from_kraus(std::move(ops));
}

PauliChannelSpec random_pauli_spec(Eigen::Index p_dim, Rng& rng) {
  if (p_dim != 2 && p_dim != 4) throw DomainError("random_pauli_channel: p_dim must be 2 or 4");
  const std::size_t r = p_dim == 2 ? 4 : 16;
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> w(r);
  for (auto& x : w) x = gamma(rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= total;
  return PauliChannelSpec(std::move(w));
}

QuantumChannel random_pauli_channel(Eigen::Index p_dim, Rng& rng) {
  return pauli_channel(random_pauli_spec(p_dim, rng));
}

ComplexMatrix depolarize_linear(const ComplexMatrix& x, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("depolarize: lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
  const auto p = static_cast<double>(x.rows());
  return (1.0 - lambda) * x +
         (lambda / p) * x.trace() * ComplexMatrix::Identity(x.rows(), x.cols());
}

DensityMatrix depolarize(const DensityMatrix& rho, double lambda) {
  return DensityMatrix(depolarize_linear(rho.matrix(), lambda));
}

ComplexMatrix to_choi(const QuantumChannel& ch) {
  if (const auto* c = std::get_if<ChoiRep>(&ch.rep())) return c->matrix;
  const Eigen::Index a = ch.in_dim();
  const Eigen::Index b = ch.out_dim();
  ComplexMatrix choi = ComplexMatrix::Zero(a * b, a * b);
  for (Eigen::Index i = 0; i < a; ++i)
    for (Eigen::Index j = 0; j < a; ++j)
      choi.block(i * b, j * b, b, b) = apply_linear(ch, unit(a, i, j));
  return choi;
}

QuantumChannel from_choi(const ComplexMatrix& m, Eigen::Index a, Eigen::Index b,
                         const Tolerance& tol) {
  return QuantumChannel::from_choi(m, a, b, tol);
}

ChoiValidity check_choi(const ComplexMatrix& m, Eigen::Index a, Eigen::Index b,
                        const Tolerance& tol) {
  if (a < 1 || b < 1 || m.rows() != a * b || m.cols() != a * b) {
    throw ShapeError("check_choi: matrix is not ab x ab");
  }
  ChoiValidity v;
  v.hermitian_deviation = max_abs_diff(m, m.adjoint());
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
  v.min_eigenvalue = es.eigenvalues().minCoeff();
  v.trace_preservation_deviation =
      max_abs_diff(partial_trace(m, {a, b}, Keep::First), ComplexMatrix::Identity(a, a));
  v.valid = v.hermitian_deviation <= tol.eps_structural && v.min_eigenvalue >= -tol.eps_psd &&
            v.trace_preservation_deviation <= tol.eps_structural;
  return v;
}

std::vector<DensityMatrix> tomography_probes(Eigen::Index a) {
  const int q = log2_dim(a);
  if (q < 0) throw DomainError("tomography_probes: input dimension must be a power of two");
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<ComplexVector> single(4, ComplexVector(2));
  single[0] << 1.0, 0.0;
  single[1] << 0.0, 1.0;
  single[2] << r, r;
  single[3] << r, Complex(0.0, r);
  std::vector<ComplexVector> kets{ComplexVector::Ones(1)};
  for (int k = 0; k < q; ++k) {
    std::vector<ComplexVector> next;
    for (const auto& prefix : kets)
      for (const auto& s : single) next.push_back(tensor(prefix, s).col(0));
    kets = std::move(next);
  }
  std::vector<DensityMatrix> probes;
  probes.reserve(kets.size());
  for (const auto& k : kets) probes.push_back(DensityMatrix(k * k.adjoint()));
  return probes;
}

ChannelCandidate reconstruct_channel(const Predictor& predictor, Eigen::Index a) {
  const auto probes = tomography_probes(a);
  const Eigen::Index n = a * a;
  ComplexMatrix basis(n, n);
  std::vector<ComplexMatrix> outputs;
  outputs.reserve(probes.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    const ComplexMatrix& p = probes[static_cast<std::size_t>(k)].matrix();
    basis.col(k) = Eigen::Map<const ComplexVector>(p.data(), p.size());
    outputs.push_back(predictor(probes[static_cast<std::size_t>(k)]));
  }
  const Eigen::Index b = outputs.front().rows();
  for (const auto& o : outputs) {
    if (o.rows() != b || o.cols() != b) throw ShapeError("reconstruct_channel: predictor output is not b x b");
  }
  Eigen::FullPivLU<ComplexMatrix> lu(basis);
  if (!lu.isInvertible()) throw Error("reconstruct_channel: probe system is singular");

  ChannelCandidate cand;
  cand.a = a;
  cand.b = b;
  cand.choi = ComplexMatrix::Zero(a * b, a * b);
  for (Eigen::Index i = 0; i < a; ++i) {
    for (Eigen::Index j = 0; j < a; ++j) {
      const ComplexMatrix e = unit(a, i, j);
      const ComplexVector coef = lu.solve(Eigen::Map<const ComplexVector>(e.data(), e.size()));
      ComplexMatrix image = ComplexMatrix::Zero(b, b);
      for (Eigen::Index k = 0; k < n; ++k) image += coef(k) * outputs[static_cast<std::size_t>(k)];
      cand.choi.block(i * b, j * b, b, b) = image;
    }
  }
  cand.validity = check_choi(cand.choi, a, b);
  return cand;
}

ChannelCandidate as_candidate(const QuantumChannel& ch) {
  ChannelCandidate c;
  c.a = ch.in_dim();
  c.b = ch.out_dim();
  c.choi = to_choi(ch);
  c.validity = check_choi(c.choi, c.a, c.b);
  return c;
}

double recovery_error(const ChannelCandidate& x, const ChannelCandidate& y) {
  if (x.a != y.a || x.b != y.b) throw ShapeError("recovery_error: channel dimensions differ");
  return frobenius_norm(x.choi - y.choi);
}

double recovery_error(const QuantumChannel& truth, const ChannelCandidate& learned) {
  return recovery_error(as_candidate(truth), learned);
}

nlohmann::json channel_to_json(const QuantumChannel& ch) {
  nlohmann::json j = {{"a", ch.in_dim()}, {"b", ch.out_dim()}};
  if (const auto* k = std::get_if<KrausRep>(&ch.rep())) {
    j["rep"] = "kraus";
    j["ops"] = nlohmann::json::array();
    for (const auto& op : k->ops) j["ops"].push_back(matrix_to_json(op));
  } else {
    j["rep"] = "choi";
    j["matrix"] = matrix_to_json(std::get<ChoiRep>(ch.rep()).matrix);
  }
  return j;
}

QuantumChannel channel_from_json(const nlohmann::json& j) {
  const std::string rep = j.at("rep").get<std::string>();
  if (rep == "kraus") {
    std::vector<ComplexMatrix> ops;
    for (const auto& op : j.at("ops")) ops.push_back(matrix_from_json(op));
    return QuantumChannel::from_kraus(std::move(ops));
  }
  if (rep == "choi") {
    return QuantumChannel::from_choi(matrix_from_json(j.at("matrix")), j.at("a").get<Eigen::Index>(),
                                     j.at("b").get<Eigen::Index>());
  }
  throw ValidityError("channel_from_json: unknown rep \"" + rep + "\"");
}

}  // namespace qovk
