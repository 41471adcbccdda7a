#include "qovk/qkernels.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace qovk {

namespace {

constexpr double kPureRankSlack = 1e-8;

bool is_rank_one(const DensityMatrix& rho) {
  const RealVector ev = hermitian_eigenvalues(rho.matrix());
  return ev.size() < 2 || ev(ev.size() - 2) <= kPureRankSlack;
}

ComplexVector vec(const ComplexMatrix& a) {
  return Eigen::Map<const ComplexVector>(a.data(), a.size());
}

void require_same_dim(const DensityMatrix& x, const DensityMatrix& z, const char* op) {
  if (x.dim() != z.dim()) {
    std::ostringstream os;
    os << op << ": input dimensions " << x.dim() << " and " << z.dim() << " differ";
    throw ShapeError(os.str());
  }
}

}  // namespace

std::string to_string(FeatureRule rule) {
  switch (rule) {
    case FeatureRule::Product: return "product";
    case FeatureRule::Symmetrized: return "symmetrized";
    case FeatureRule::VectorizedOuter: return "vectorized_outer";
  }
  return "unknown";
}

FeatureRule feature_rule_from_string(const std::string& name) {
  if (name == "product") return FeatureRule::Product;
  if (name == "symmetrized") return FeatureRule::Symmetrized;
  if (name == "vectorized_outer") return FeatureRule::VectorizedOuter;
  throw DomainError("unknown feature rule \"" + name + "\"");
}

Eigen::Index feature_dim(FeatureRule rule, Eigen::Index input_dim) {
  return rule == FeatureRule::VectorizedOuter ? input_dim * input_dim : input_dim;
}

ComplexMatrix feature_matrix(FeatureRule rule, const DensityMatrix& rho_x,
                             const DensityMatrix& rho_z, const Tolerance& tol) {
  (void)tol;
  require_same_dim(rho_x, rho_z, "feature_matrix");
  const ComplexMatrix& x = rho_x.matrix();
  const ComplexMatrix& z = rho_z.matrix();
  switch (rule) {
    case FeatureRule::Product:
      return x * z;
    case FeatureRule::Symmetrized: {
      if (!is_rank_one(rho_x) || !is_rank_one(rho_z)) {
        throw DomainError("feature_matrix: symmetrized rule requires pure (rank-one) inputs");
      }
      // <psi_x|psi_z> |psi_x><psi_z| = rho_x rho_z for rank-one projectors.
      const ComplexMatrix xz = x * z;
      const double overlap = xz.trace().real();
      return (x + z + xz + xz.adjoint()) / (2.0 * (1.0 + overlap));
    }
    case FeatureRule::VectorizedOuter:
      return vec(x) * vec(z).adjoint();
  }
  throw DomainError("feature_matrix: unknown rule");
}

double scalar_kernel(const DensityMatrix& rho_x, const DensityMatrix& rho_z) {
  require_same_dim(rho_x, rho_z, "scalar_kernel");
  // Tr[AB] = sum_ij A_ij B_ji
  return (rho_x.matrix().array() * rho_z.matrix().transpose().array()).sum().real();
}

OVKernelSpec OVKernelSpec::unitary(FeatureRule rule, ComplexMatrix u, DensityMatrix rho_y,
                                   const Tolerance& tol) {
  const Eigen::Index p = rho_y.dim();
  if (!is_square(u) || u.rows() % p != 0) {
    throw ShapeError("OVKernelSpec: unitary side must be a multiple of dim(rho_Y)");
  }
  if (!is_unitary(u, tol)) throw DomainError("OVKernelSpec: coupling matrix is not unitary");
  const Eigen::Index m = u.rows() / p;
  return OVKernelSpec(rule, UnitaryDilation{std::move(u), std::move(rho_y)}, p, m);
}

OVKernelSpec OVKernelSpec::kraus(FeatureRule rule, std::vector<ComplexMatrix> ops) {
  if (ops.empty()) throw ShapeError("OVKernelSpec: empty Kraus set");
  const Eigen::Index p = ops.front().rows();
  const Eigen::Index m = ops.front().cols();
  for (const auto& op : ops) {
    if (op.rows() != p || op.cols() != m) {
      throw ShapeError("OVKernelSpec: Kraus operators must share one shape");
    }
    if (!op.allFinite()) throw DomainError("OVKernelSpec: non-finite Kraus entry");
  }
  return OVKernelSpec(rule, KrausForm{std::move(ops)}, p, m);
}

Eigen::Index block_dim(const KernelChoice& k) {
  if (const auto* spec = std::get_if<OVKernelSpec>(&k)) return spec->p();
  return 1;
}

ComplexMatrix eval_ovk(const OVKernelSpec& spec, const DensityMatrix& rho_x,
                       const DensityMatrix& rho_z) {
  require_same_dim(rho_x, rho_z, "eval_ovk");
  if (feature_dim(spec.feature_rule(), rho_x.dim()) != spec.m()) {
    std::ostringstream os;
    os << "eval_ovk: inputs of dimension " << rho_x.dim() << " give feature dimension "
       << feature_dim(spec.feature_rule(), rho_x.dim()) << ", kernel expects " << spec.m();
    throw ShapeError(os.str());
  }
  const ComplexMatrix sigma = feature_matrix(spec.feature_rule(), rho_x, rho_z);
  if (const auto* dil = std::get_if<UnitaryDilation>(&spec.coupling())) {
    const ComplexMatrix joint = dil->unitary * tensor(dil->rho_y.matrix(), sigma) *
                                dil->unitary.adjoint();
    return partial_trace(joint, {spec.p(), spec.m()}, Keep::First);
  }
  const auto& kraus = std::get<KrausForm>(spec.coupling());
  ComplexMatrix out = ComplexMatrix::Zero(spec.p(), spec.p());
  for (const auto& op : kraus.ops) out += op * sigma * op.adjoint();
  return out;
}

ComplexMatrix eval_kernel(const KernelChoice& k, const DensityMatrix& rho_x,
                          const DensityMatrix& rho_z) {
  if (const auto* spec = std::get_if<OVKernelSpec>(&k)) return eval_ovk(*spec, rho_x, rho_z);
  ComplexMatrix out(1, 1);
  out(0, 0) = scalar_kernel(rho_x, rho_z);
  return out;
}

std::vector<ComplexMatrix> pauli_kraus_set(Eigen::Index p) {
  std::vector<ComplexMatrix> ops;
  if (p == 2) {
    for (int k = 0; k < 4; ++k) ops.push_back(pauli(k) / 2.0);
  } else if (p == 4) {
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) ops.push_back(tensor(pauli(j), pauli(k)) / 4.0);
  } else {
    throw DomainError("pauli_kraus_set: p must be 2 or 4");
  }
  return ops;
}

std::vector<ComplexMatrix> pauli_superoperator_kraus_set(Eigen::Index b) {
  std::vector<ComplexMatrix> paulis;
  if (b == 2) {
    for (int k = 0; k < 4; ++k) paulis.push_back(pauli(k));
  } else if (b == 4) {
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) paulis.push_back(tensor(pauli(j), pauli(k)));
  } else {
    throw DomainError("pauli_superoperator_kraus_set: b must be 2 or 4");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(paulis.size()));
  std::vector<ComplexMatrix> ops;
  ops.reserve(paulis.size());
  // vec(P rho P^dagger) = (conj(P) (x) P) vec(rho) for column-major vec.
  for (const auto& s : paulis) ops.push_back(tensor(s.conjugate(), s) * scale);
  return ops;
}

RealVector operator_schmidt_coefficients(const ComplexMatrix& u, Eigen::Index p, Eigen::Index m) {
  if (u.rows() != p * m || u.cols() != p * m) {
    throw ShapeError("operator_schmidt_coefficients: matrix does not factor as p*m");
  }
  ComplexMatrix r(p * p, m * m);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      for (Eigen::Index k = 0; k < m; ++k)
        for (Eigen::Index l = 0; l < m; ++l) r(i * p + j, k * m + l) = u(i * m + k, j * m + l);
  Eigen::JacobiSVD<ComplexMatrix> svd(r);
  return svd.singularValues();
}

bool is_product_operator(const ComplexMatrix& u, Eigen::Index p, Eigen::Index m,
                         double threshold) {
  const RealVector s = operator_schmidt_coefficients(u, p, m);
  if (s.size() < 2 || s(0) == 0.0) return true;
  return s(1) / s(0) <= threshold;
}

ComplexMatrix sample_entangled_unitary(Eigen::Index p, Eigen::Index m, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    ComplexMatrix u = haar_random_unitary(p * m, rng);
    if (p == 1 || m == 1 || !is_product_operator(u, p, m)) return u;
  }
  throw DomainError("sample_entangled_unitary: no entangling unitary exists for these dimensions");
}

BlockGram::BlockGram(Eigen::Index n, Eigen::Index p)
    : n_(n), p_(p), blocks_(static_cast<std::size_t>(n * n), ComplexMatrix::Zero(p, p)) {
  if (n < 1 || p < 1) throw ShapeError("BlockGram: n and p must be positive");
}

const ComplexMatrix& BlockGram::block(Eigen::Index i, Eigen::Index j) const {
  return blocks_.at(static_cast<std::size_t>(i * n_ + j));
}

ComplexMatrix& BlockGram::block(Eigen::Index i, Eigen::Index j) {
  return blocks_.at(static_cast<std::size_t>(i * n_ + j));
}

ComplexMatrix BlockGram::flatten() const {
  ComplexMatrix g(n_ * p_, n_ * p_);
  for (Eigen::Index i = 0; i < n_; ++i)
    for (Eigen::Index j = 0; j < n_; ++j) g.block(i * p_, j * p_, p_, p_) = block(i, j);
  return g;
}

double BlockGram::hermitian_block_deviation() const {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < n_; ++i)
    for (Eigen::Index j = i; j < n_; ++j)
      dev = std::max(dev, max_abs_diff(block(i, j), block(j, i).adjoint()));
  return dev;
}

BlockGram gram(const KernelChoice& k, const std::vector<DensityMatrix>& data) {
  if (data.empty()) throw ShapeError("gram: empty dataset");
  for (const auto& d : data) {
    if (d.dim() != data.front().dim()) throw ShapeError("gram: inputs have mixed dimensions");
  }
  const auto n = static_cast<Eigen::Index>(data.size());
  BlockGram g(n, block_dim(k));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g.block(i, j) = eval_kernel(k, data[static_cast<std::size_t>(i)],
                                  data[static_cast<std::size_t>(j)]);
  return g;
}

PsdReport validate_psd(const BlockGram& g, const std::vector<ComplexVector>& probes,
                       const Tolerance& tol) {
  PsdReport report;
  const ComplexMatrix flat = g.flatten();
  report.hermitian_deviation = g.hermitian_block_deviation();
  const ComplexMatrix herm = 0.5 * (flat + flat.adjoint());
  report.min_eigenvalue = min_eigenvalue_hermitian(herm);
  report.min_quadratic_form = report.min_eigenvalue;
  for (const auto& y : probes) {
    if (y.size() != flat.rows()) {
      throw ShapeError("validate_psd: probe length must be n*p = " + std::to_string(flat.rows()));
    }
    const double norm2 = y.squaredNorm();
    if (norm2 == 0.0) continue;
    const double q = y.dot(flat * y).real() / norm2;
    report.min_quadratic_form = std::min(report.min_quadratic_form, q);
  }
  if (probes.empty()) report.min_quadratic_form = report.min_eigenvalue;
  report.violation = report.hermitian_deviation > tol.eps_structural ||
                     report.min_eigenvalue < -tol.eps_psd ||
                     report.min_quadratic_form < -tol.eps_psd;
  return report;
}

std::vector<ComplexVector> random_probes(Eigen::Index n, Eigen::Index p, std::size_t count,
                                         Rng& rng) {
  std::vector<ComplexVector> probes;
  probes.reserve(count);
  for (std::size_t k = 0; k < count; ++k) probes.push_back(complex_ginibre(n * p, 1, rng).col(0));
  return probes;
}

nlohmann::json kernel_spec_to_json(const OVKernelSpec& spec) {
  nlohmann::json coupling;
  if (const auto* dil = std::get_if<UnitaryDilation>(&spec.coupling())) {
    coupling = {{"type", "unitary"},
                {"unitary", matrix_to_json(dil->unitary)},
                {"rho_y", matrix_to_json(dil->rho_y.matrix())}};
  } else {
    nlohmann::json ops = nlohmann::json::array();
    for (const auto& op : std::get<KrausForm>(spec.coupling()).ops) ops.push_back(matrix_to_json(op));
    coupling = {{"type", "kraus"}, {"ops", ops}};
  }
  return {{"feature_rule", to_string(spec.feature_rule())},
          {"coupling", coupling},
          {"p", spec.p()},
          {"m", spec.m()}};
}

OVKernelSpec kernel_spec_from_json(const nlohmann::json& j) {
  const FeatureRule rule = feature_rule_from_string(j.at("feature_rule").get<std::string>());
  const auto& c = j.at("coupling");
  const std::string type = c.at("type").get<std::string>();
  std::optional<OVKernelSpec> spec;
  if (type == "unitary") {
    spec = OVKernelSpec::unitary(rule, matrix_from_json(c.at("unitary")),
                                 DensityMatrix(matrix_from_json(c.at("rho_y"))));
  } else if (type == "kraus") {
    std::vector<ComplexMatrix> ops;
    for (const auto& op : c.at("ops")) ops.push_back(matrix_from_json(op));
    spec = OVKernelSpec::kraus(rule, std::move(ops));
  } else {
    throw ValidityError("kernel_spec_from_json: unknown coupling type \"" + type + "\"");
  }
  if (j.contains("p") && j.at("p").get<Eigen::Index>() != spec->p()) {
    throw ShapeError("kernel_spec_from_json: declared p disagrees with coupling");
  }
  if (j.contains("m") && j.at("m").get<Eigen::Index>() != spec->m()) {
    throw ShapeError("kernel_spec_from_json: declared m disagrees with coupling");
  }
  return *spec;
}

nlohmann::json kernel_choice_to_json(const KernelChoice& k) {
  if (const auto* spec = std::get_if<OVKernelSpec>(&k)) {
    return {{"kind", "ovk"}, {"spec", kernel_spec_to_json(*spec)}};
  }
  return {{"kind", "scalar"}};
}

KernelChoice kernel_choice_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "scalar") return ScalarKernel{};
  if (kind == "ovk") return kernel_spec_from_json(j.at("spec"));
  throw ValidityError("kernel_choice_from_json: unknown kind \"" + kind + "\"");
}

}  // namespace qovk
