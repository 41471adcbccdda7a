#include "qovk/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace qovk::circuit {

namespace {

struct Split {
  Eigen::Index before;
  Eigen::Index reg;
  Eigen::Index after;
};

Split split_at(const Layout& layout, const std::string& name) {
  const std::size_t idx = layout.index_of(name);
  int before = 0;
  for (std::size_t k = 0; k < idx; ++k) before += layout.registers()[k].qubits;
  const int q = layout.registers()[idx].qubits;
  const int after = layout.total_qubits() - before - q;
  return {Eigen::Index{1} << before, Eigen::Index{1} << q, Eigen::Index{1} << after};
}

/// In-place G applied to the amplitude index space of every column of m.
void left_apply(ComplexMatrix& m, const ComplexMatrix& gate, const std::vector<int>& targets,
                int total_qubits) {
  const int k = static_cast<int>(targets.size());
  const Eigen::Index gdim = Eigen::Index{1} << k;
  std::vector<Eigen::Index> masks(static_cast<std::size_t>(k));
  Eigen::Index target_mask = 0;
  for (int r = 0; r < k; ++r) {
    masks[static_cast<std::size_t>(r)] = Eigen::Index{1} << (total_qubits - 1 - targets[static_cast<std::size_t>(r)]);
    target_mask |= masks[static_cast<std::size_t>(r)];
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(gdim));
  for (Eigen::Index g = 0; g < gdim; ++g) {
    Eigen::Index off = 0;
    for (int r = 0; r < k; ++r)
      if (g & (Eigen::Index{1} << (k - 1 - r))) off |= masks[static_cast<std::size_t>(r)];
    idx[static_cast<std::size_t>(g)] = off;
  }
  ComplexMatrix gathered(gdim, m.cols());
  for (Eigen::Index base = 0; base < m.rows(); ++base) {
    if (base & target_mask) continue;
    for (Eigen::Index g = 0; g < gdim; ++g) gathered.row(g) = m.row(base | idx[static_cast<std::size_t>(g)]);
    const ComplexMatrix updated = gate * gathered;
    for (Eigen::Index g = 0; g < gdim; ++g) m.row(base | idx[static_cast<std::size_t>(g)]) = updated.row(g);
  }
}

ComplexMatrix ket_product(const std::vector<const ComplexVector*>& kets) {
  ComplexMatrix v = *kets.front();
  for (std::size_t i = 1; i < kets.size(); ++i) v = tensor(v, *kets[i]);
  return v;
}

ComplexMatrix proj(const ComplexVector& v) { return v * v.adjoint(); }

ComplexMatrix outer(const ComplexVector& a, const ComplexVector& b) { return a * b.adjoint(); }

ComplexVector basis_ket(Eigen::Index i) {
  ComplexVector v = ComplexVector::Zero(2);
  v(i) = 1.0;
  return v;
}

}  // namespace

Layout::Layout(std::vector<Register> registers) : registers_(std::move(registers)) {
  std::set<std::string> names;
  for (const auto& r : registers_) {
    if (r.qubits < 1) throw DomainError("Layout: register " + r.name + " needs at least one qubit");
    if (!names.insert(r.name).second) throw DomainError("Layout: duplicate register " + r.name);
    total_ += r.qubits;
  }
  if (registers_.empty()) throw DomainError("Layout: no registers");
  if (total_ > kMaxQubits) {
    throw SizeError("Layout: " + std::to_string(total_) + " qubits exceeds the cap of " +
                    std::to_string(kMaxQubits));
  }
}

std::size_t Layout::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < registers_.size(); ++i)
    if (registers_[i].name == name) return i;
  throw ShapeError("Layout: no register named " + name);
}

std::vector<int> Layout::qubits_of(const std::string& name) const {
  const std::size_t idx = index_of(name);
  int start = 0;
  for (std::size_t k = 0; k < idx; ++k) start += registers_[k].qubits;
  std::vector<int> q(static_cast<std::size_t>(registers_[idx].qubits));
  std::iota(q.begin(), q.end(), start);
  return q;
}

Layout Layout::without(const std::string& name) const {
  std::vector<Register> rest;
  const std::size_t idx = index_of(name);
  for (std::size_t i = 0; i < registers_.size(); ++i)
    if (i != idx) rest.push_back(registers_[i]);
  return Layout(std::move(rest));
}

CircuitState product_state(const Layout& layout, const std::vector<PureState>& parts) {
  if (parts.size() != layout.registers().size()) {
    throw ShapeError("product_state: one state per register required");
  }
  ComplexVector v = ComplexVector::Ones(1);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].dim() != (Eigen::Index{1} << layout.registers()[i].qubits)) {
      throw ShapeError("product_state: state for register " + layout.registers()[i].name +
                       " has the wrong dimension");
    }
    v = tensor(v, parts[i].amplitudes());
  }
  return {proj(v), layout};
}

CircuitState apply_gate(const CircuitState& s, const ComplexMatrix& gate,
                        const std::vector<int>& targets, const Tolerance& tol) {
  const int n = s.layout.total_qubits();
  if (targets.empty() || gate.rows() != (Eigen::Index{1} << targets.size())) {
    throw ShapeError("apply_gate: gate side does not match " + std::to_string(targets.size()) +
                     " target qubits");
  }
  std::set<int> seen;
  for (int t : targets) {
    if (t < 0 || t >= n || !seen.insert(t).second) {
      throw ShapeError("apply_gate: invalid or repeated target qubit " + std::to_string(t));
    }
  }
  if (!is_unitary(gate, tol)) throw DomainError("apply_gate: gate is not unitary");
  ComplexMatrix rho = s.rho;
  left_apply(rho, gate, targets, n);
  ComplexMatrix tmp = rho.adjoint();
  left_apply(tmp, gate, targets, n);
  return {tmp.adjoint(), s.layout};
}

CircuitState apply_gate(const CircuitState& s, const ComplexMatrix& gate,
                        const std::vector<std::string>& registers, const Tolerance& tol) {
  std::vector<int> targets;
  for (const auto& r : registers) {
    const auto q = s.layout.qubits_of(r);
    targets.insert(targets.end(), q.begin(), q.end());
  }
  return apply_gate(s, gate, targets, tol);
}

CircuitState trace_out(const CircuitState& s, const std::string& reg) {
  const Split sp = split_at(s.layout, reg);
  const Eigen::Index rest = sp.before * sp.after;
  ComplexMatrix out = ComplexMatrix::Zero(rest, rest);
  for (Eigen::Index a = 0; a < sp.before; ++a)
    for (Eigen::Index b = 0; b < sp.after; ++b)
      for (Eigen::Index a2 = 0; a2 < sp.before; ++a2)
        for (Eigen::Index b2 = 0; b2 < sp.after; ++b2) {
          Complex acc = 0.0;
          for (Eigen::Index r = 0; r < sp.reg; ++r)
            acc += s.rho((a * sp.reg + r) * sp.after + b, (a2 * sp.reg + r) * sp.after + b2);
          out(a * sp.after + b, a2 * sp.after + b2) = acc;
        }
  return {out, s.layout.without(reg)};
}

CircuitState permute_registers(const CircuitState& s, const std::vector<std::string>& order) {
  if (order.size() != s.layout.registers().size()) {
    throw ShapeError("permute_registers: order must list every register once");
  }
  std::vector<Register> regs;
  std::vector<int> source_qubits;
  for (const auto& name : order) {
    regs.push_back(s.layout.reg(name));
    const auto q = s.layout.qubits_of(name);
    source_qubits.insert(source_qubits.end(), q.begin(), q.end());
  }
  Layout layout(std::move(regs));
  const int n = layout.total_qubits();
  const Eigen::Index dim = layout.dim();
  // new qubit k carries old qubit source_qubits[k]
  std::vector<Eigen::Index> map(static_cast<std::size_t>(dim));
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    Eigen::Index old = 0;
    for (int k = 0; k < n; ++k)
      if (idx & (Eigen::Index{1} << (n - 1 - k)))
        old |= Eigen::Index{1} << (n - 1 - source_qubits[static_cast<std::size_t>(k)]);
    map[static_cast<std::size_t>(idx)] = old;
  }
  ComplexMatrix out(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      out(i, j) = s.rho(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]);
  return {out, layout};
}

namespace {

ComplexMatrix projected_block(const CircuitState& s, const std::string& reg, Eigen::Index outcome) {
  const Split sp = split_at(s.layout, reg);
  if (outcome < 0 || outcome >= sp.reg) throw DomainError("measure: outcome out of range");
  const Eigen::Index rest = sp.before * sp.after;
  ComplexMatrix out(rest, rest);
  for (Eigen::Index a = 0; a < sp.before; ++a)
    for (Eigen::Index b = 0; b < sp.after; ++b)
      for (Eigen::Index a2 = 0; a2 < sp.before; ++a2)
        for (Eigen::Index b2 = 0; b2 < sp.after; ++b2)
          out(a * sp.after + b, a2 * sp.after + b2) =
              s.rho((a * sp.reg + outcome) * sp.after + b, (a2 * sp.reg + outcome) * sp.after + b2);
  return out;
}

}  // namespace

double outcome_probability(const CircuitState& s, const std::string& reg, Eigen::Index outcome) {
  return projected_block(s, reg, outcome).trace().real();
}

MeasurementOutcome measure_postselect(const CircuitState& s, const std::string& reg,
                                      Eigen::Index outcome) {
  ComplexMatrix block = projected_block(s, reg, outcome);
  const double prob = block.trace().real();
  if (prob < 1e-12) {
    throw PostselectionError("measure_postselect: outcome has probability " +
                                 std::to_string(prob),
                             prob);
  }
  block /= prob;
  return {std::clamp(prob, 0.0, 1.0), CircuitState{std::move(block), s.layout.without(reg)}};
}

ComplexMatrix cswap(int qubits) {
  const Eigen::Index d = Eigen::Index{1} << qubits;
  const Eigen::Index half = d * d;
  ComplexMatrix g = ComplexMatrix::Zero(2 * half, 2 * half);
  g.topLeftCorner(half, half).setIdentity();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(half + j * d + i, half + i * d + j) = 1.0;
  return g;
}

double run_scalar_swap_test(const PureState& psi_x, const PureState& psi_z) {
  const int t = psi_x.num_qubits();
  if (t < 1 || psi_z.num_qubits() != t) {
    throw ShapeError("run_scalar_swap_test: inputs need equal qubit counts");
  }
  const Layout layout({{"a", 1}, {"Z", t}, {"X", t}});
  CircuitState s = product_state(layout, {PureState::basis(2, 0), psi_z, psi_x});
  s = apply_gate(s, hadamard(), std::vector<std::string>{"a"});
  s = apply_gate(s, cswap(t), std::vector<std::string>{"a", "Z", "X"});
  s = apply_gate(s, hadamard(), std::vector<std::string>{"a"});
  return 2.0 * outcome_probability(s, "a", 0) - 1.0;
}

OvkCircuitRun run_ovk_circuit(const PureState& psi_x, const PureState& psi_z,
                              const PureState& phi_y, const ComplexMatrix& u) {
  const int t = psi_x.num_qubits();
  const int s_q = phi_y.num_qubits();
  if (t < 1 || psi_z.num_qubits() != t || s_q < 1) {
    throw ShapeError("run_ovk_circuit: inputs must be qubit states of equal size");
  }
  if (u.rows() != (Eigen::Index{1} << (t + s_q)) || u.cols() != u.rows()) {
    throw ShapeError("run_ovk_circuit: U must have side 2^(t+s)");
  }
  const Layout layout({{"a", 1}, {"Z", t}, {"X", t}, {"Y", s_q}});
  OvkCircuitRun run{
      .psi1 = product_state(layout, {PureState::basis(2, 0), psi_z, psi_x, phi_y}),
      .psi2 = {ComplexMatrix(), layout},
      .psi3 = {ComplexMatrix(), layout},
      .psi4 = {ComplexMatrix(), layout},
      .eta1 = {ComplexMatrix(), layout},
  };
  run.psi2 = apply_gate(run.psi1, hadamard(), std::vector<std::string>{"a"});
  run.psi3 = apply_gate(run.psi2, cswap(t), std::vector<std::string>{"a", "Z", "X"});
  run.psi4 = apply_gate(run.psi3, hadamard(), std::vector<std::string>{"a"});
  MeasurementOutcome m = measure_postselect(run.psi4, "a", 0);
  run.p0 = m.probability;
  run.eta1 = std::move(m.post_state);
  const CircuitState xy = trace_out(run.eta1, "Z");
  run.sigma = trace_out(xy, "Y").rho;
  const CircuitState evolved = apply_gate(xy, u, std::vector<std::string>{"Y", "X"});
  const CircuitState yx = permute_registers(evolved, {"Y", "X"});
  run.eta2 = yx.rho;
  run.kernel = trace_out(yx, "X").rho;
  return run;
}

ShotResult sample_shots(const CircuitState& s, const std::string& reg, long shots, Rng& rng) {
  if (shots < 1) throw DomainError("sample_shots: shots must be >= 1");
  const double p = std::clamp(outcome_probability(s, reg, 0), 0.0, 1.0);
  std::binomial_distribution<long> dist(shots, p);
  ShotResult r;
  r.shots = shots;
  r.zeros = dist(rng);
  r.frequency = static_cast<double>(r.zeros) / static_cast<double>(shots);
  return r;
}

namespace closed_form {

ComplexMatrix psi2(const PureState& psi_x, const PureState& psi_z, const PureState& phi) {
  const ComplexVector plus = (basis_ket(0) + basis_ket(1)) / std::sqrt(2.0);
  return proj(ket_product({&plus, &psi_z.amplitudes(), &psi_x.amplitudes(), &phi.amplitudes()}));
}

ComplexMatrix psi3(const PureState& psi_x, const PureState& psi_z, const PureState& phi) {
  const ComplexVector k0 = basis_ket(0);
  const ComplexVector k1 = basis_ket(1);
  const ComplexMatrix v =
      (ket_product({&k0, &psi_z.amplitudes(), &psi_x.amplitudes()}) +
       ket_product({&k1, &psi_x.amplitudes(), &psi_z.amplitudes()})) / std::sqrt(2.0);
  return proj(tensor(v, phi.amplitudes()).col(0));
}

ComplexMatrix psi4(const PureState& psi_x, const PureState& psi_z, const PureState& phi) {
  const ComplexVector& x = psi_x.amplitudes();
  const ComplexVector& z = psi_z.amplitudes();
  const ComplexMatrix zx = tensor(proj(z), proj(x));
  const ComplexMatrix xz = tensor(proj(x), proj(z));
  const ComplexMatrix cross1 = tensor(outer(z, x), outer(x, z));
  const ComplexMatrix cross2 = tensor(outer(x, z), outer(z, x));
  const ComplexVector k0 = basis_ket(0);
  const ComplexVector k1 = basis_ket(1);
  const ComplexMatrix sigma_psi4 =
      (tensor(outer(k0, k0), zx + xz + cross1 + cross2) +
       tensor(outer(k0, k1), zx - xz - cross1 + cross2) +
       tensor(outer(k1, k0), zx - xz + cross1 - cross2) +
       tensor(outer(k1, k1), zx + xz - cross1 - cross2)) / 4.0;
  return tensor(sigma_psi4, proj(phi.amplitudes()));
}

double p0(const PureState& psi_x, const PureState& psi_z) {
  return 0.5 + 0.5 * std::norm(psi_x.amplitudes().dot(psi_z.amplitudes()));
}

ComplexMatrix eta1(const PureState& psi_x, const PureState& psi_z, const PureState& phi) {
  const ComplexVector& x = psi_x.amplitudes();
  const ComplexVector& z = psi_z.amplitudes();
  const double overlap2 = std::norm(z.dot(x));
  const ComplexMatrix num = tensor(proj(z), proj(x)) + tensor(proj(x), proj(z)) +
                            tensor(outer(z, x), outer(x, z)) + tensor(outer(x, z), outer(z, x));
  return tensor(num / (2.0 * (1.0 + overlap2)), proj(phi.amplitudes()));
}

ComplexMatrix sigma(const PureState& psi_x, const PureState& psi_z) {
  const ComplexVector& x = psi_x.amplitudes();
  const ComplexVector& z = psi_z.amplitudes();
  const Complex xz = x.dot(z);  // <psi_x|psi_z>
  const Complex zx = z.dot(x);  // <psi_z|psi_x>
  return (proj(x) + proj(z) + xz * outer(x, z) + zx * outer(z, x)) / (2.0 * (1.0 + std::norm(zx)));
}

ComplexMatrix eta2(const PureState& psi_x, const PureState& psi_z, const PureState& phi,
                   const ComplexMatrix& u) {
  return u * tensor(proj(phi.amplitudes()), sigma(psi_x, psi_z)) * u.adjoint();
}

ComplexMatrix kernel(const PureState& psi_x, const PureState& psi_z, const PureState& phi,
                     const ComplexMatrix& u) {
  return partial_trace(eta2(psi_x, psi_z, phi, u), {phi.dim(), psi_x.dim()}, Keep::First);
}

}  // namespace closed_form

double VerificationReport::worst() const {
  double w = max_probability_deviation;
  for (const auto& [name, dev] : max_deviation) w = std::max(w, dev);
  return w;
}

VerificationReport verify_kernel_circuit(int instances, int t, int s, Rng& rng) {
  VerificationReport rep;
  rep.instances = instances;
  const char* names[] = {"psi2", "psi3", "psi4", "eta1", "sigma", "eta2", "kernel"};
  for (const char* n : names) rep.max_deviation.emplace_back(n, 0.0);
  const Eigen::Index dt = Eigen::Index{1} << t;
  const Eigen::Index ds = Eigen::Index{1} << s;
  for (int i = 0; i < instances; ++i) {
    const PureState x = random_pure_state(dt, rng);
    const PureState z = random_pure_state(dt, rng);
    const PureState phi = random_pure_state(ds, rng);
    const ComplexMatrix u = haar_random_unitary(dt * ds, rng);
    const OvkCircuitRun run = run_ovk_circuit(x, z, phi, u);
    const double devs[] = {
        max_abs_diff(run.psi2.rho, closed_form::psi2(x, z, phi)),
        max_abs_diff(run.psi3.rho, closed_form::psi3(x, z, phi)),
        max_abs_diff(run.psi4.rho, closed_form::psi4(x, z, phi)),
        max_abs_diff(run.eta1.rho, closed_form::eta1(x, z, phi)),
        max_abs_diff(run.sigma, closed_form::sigma(x, z)),
        max_abs_diff(run.eta2, closed_form::eta2(x, z, phi, u)),
        max_abs_diff(run.kernel, closed_form::kernel(x, z, phi, u)),
    };
    for (std::size_t k = 0; k < rep.max_deviation.size(); ++k)
      rep.max_deviation[k].second = std::max(rep.max_deviation[k].second, devs[k]);
    rep.max_probability_deviation =
        std::max(rep.max_probability_deviation, std::abs(run.p0 - closed_form::p0(x, z)));
    for (const ComplexMatrix* m : {&run.psi1.rho, &run.psi2.rho, &run.psi3.rho, &run.psi4.rho,
                                   &run.eta1.rho, &run.sigma, &run.eta2, &run.kernel}) {
      if (!is_density(*m)) rep.all_states_valid = false;
    }
  }
  return rep;
}

nlohmann::json report_to_json(const VerificationReport& r) {
  nlohmann::json dev = nlohmann::json::object();
  for (const auto& [name, d] : r.max_deviation) dev[name] = d;
  return {{"instances", r.instances},
          {"max_deviation", dev},
          {"max_probability_deviation", r.max_probability_deviation},
          {"all_states_valid", r.all_states_valid},
          {"worst", r.worst()}};
}

}  // namespace qovk::circuit
