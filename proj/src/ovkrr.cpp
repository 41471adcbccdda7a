#include "qovk/ovkrr.hpp"

#include <sstream>

namespace qovk {

ComplexVector vectorize(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvectorize(const ComplexVector& v, Eigen::Index b) {
  if (b < 1 || v.size() != b * b) {
    throw ShapeError("unvectorize: length " + std::to_string(v.size()) + " is not " +
                     std::to_string(b) + "^2");
  }
  return Eigen::Map<const ComplexMatrix>(v.data(), b, b);
}

void TrainingSet::validate() const {
  if (inputs.empty()) throw ShapeError("TrainingSet: no samples");
  if (inputs.size() != labels.size()) throw ShapeError("TrainingSet: inputs and labels differ in length");
  for (const auto& x : inputs)
    if (x.dim() != inputs.front().dim()) throw ShapeError("TrainingSet: inputs have mixed dimensions");
  for (const auto& y : labels)
    if (y.size() != labels.front().size() || y.size() == 0) {
      throw ShapeError("TrainingSet: labels have mixed lengths");
    }
}

namespace {

ComplexMatrix stacked_labels(const TrainingSet& ts) {
  const auto n = static_cast<Eigen::Index>(ts.labels.size());
  ComplexMatrix y(n, ts.label_dim());
  for (Eigen::Index i = 0; i < n; ++i) y.row(i) = ts.labels[static_cast<std::size_t>(i)].transpose();
  return y;
}

}  // namespace

RegressionModel fit(const TrainingSet& ts, const KernelChoice& kernel, double ridge,
                    const Tolerance& tol) {
  ts.validate();
  if (!(ridge > 0.0)) throw DomainError("fit: ridge must be positive");
  const Eigen::Index p = ts.label_dim();
  const auto n = static_cast<Eigen::Index>(ts.inputs.size());
  const bool scalar = std::holds_alternative<ScalarKernel>(kernel);
  if (!scalar && block_dim(kernel) != p) {
    std::ostringstream os;
    os << "fit: kernel output dimension " << block_dim(kernel) << " but labels have length " << p;
    throw ShapeError(os.str());
  }

  const BlockGram g = gram(kernel, ts.inputs);
  ComplexMatrix flat = g.flatten();
  const double asym = max_abs_diff(flat, flat.adjoint());
  if (asym > tol.eps_structural) {
    std::ostringstream os;
    os << "fit: Gram matrix is not Hermitian (deviation " << asym << ")";
    throw ValidityError(os.str());
  }
  flat = 0.5 * (flat + flat.adjoint());
  flat.diagonal().array() += ridge;

  const ComplexMatrix y = stacked_labels(ts);
  RegressionModel model{kernel, ComplexMatrix(), ridge, ts.inputs, 0.0};
  try {
    if (scalar) {
      // p right-hand sides against one n x n system.
      model.coefficients = solve_hermitian(flat, y, tol);
      model.relative_residual = (flat * model.coefficients - y).norm() / std::max(y.norm(), 1e-300);
    } else {
      // (y_1; ...; y_n) stacked into one np vector.
      ComplexMatrix yt = y.transpose();
      const ComplexVector rhs = Eigen::Map<const ComplexVector>(yt.data(), n * p);
      const ComplexVector c = solve_hermitian(flat, rhs, tol);
      model.relative_residual = (flat * c - rhs).norm() / std::max(rhs.norm(), 1e-300);
      model.coefficients = Eigen::Map<const ComplexMatrix>(c.data(), p, n).transpose();
    }
  } catch (const SingularityError& e) {
    std::ostringstream os;
    os << "fit: regularized Gram is not positive definite; Gram min eigenvalue "
       << e.min_eigenvalue() - ridge << " < -ridge " << ridge;
    throw SingularityError(os.str(), e.min_eigenvalue() - ridge);
  }
  return model;
}

ComplexVector predict(const RegressionModel& m, const DensityMatrix& x) {
  if (m.inputs.empty()) throw ShapeError("predict: model has no training inputs");
  if (x.dim() != m.inputs.front().dim()) {
    throw ShapeError("predict: input dimension " + std::to_string(x.dim()) + ", model expects " +
                     std::to_string(m.inputs.front().dim()));
  }
  const Eigen::Index p = m.coefficients.cols();
  ComplexVector out = ComplexVector::Zero(p);
  for (std::size_t i = 0; i < m.inputs.size(); ++i) {
    const ComplexVector c = m.coefficients.row(static_cast<Eigen::Index>(i)).transpose();
    if (std::holds_alternative<ScalarKernel>(m.kernel)) {
      out += scalar_kernel(x, m.inputs[i]) * c;
    } else {
      out += eval_ovk(std::get<OVKernelSpec>(m.kernel), x, m.inputs[i]) * c;
    }
  }
  return out;
}

nlohmann::json training_set_to_json(const TrainingSet& ts) {
  nlohmann::json inputs = nlohmann::json::array();
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& x : ts.inputs) inputs.push_back(state_to_json(x));
  for (const auto& y : ts.labels) labels.push_back(matrix_to_json(y));
  return {{"inputs", inputs}, {"labels", labels}};
}

TrainingSet training_set_from_json(const nlohmann::json& j) {
  TrainingSet ts;
  for (const auto& x : j.at("inputs")) ts.inputs.push_back(density_from_json(x));
  for (const auto& y : j.at("labels")) {
    const ComplexMatrix m = matrix_from_json(y);
    if (m.cols() != 1) throw ShapeError("training_set_from_json: labels must be column vectors");
    ts.labels.push_back(m.col(0));
  }
  ts.validate();
  return ts;
}

nlohmann::json model_to_json(const RegressionModel& m) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& x : m.inputs) inputs.push_back(state_to_json(x));
  return {{"kernel", kernel_choice_to_json(m.kernel)},
          {"coefficients", matrix_to_json(m.coefficients)},
          {"ridge", m.ridge},
          {"relative_residual", m.relative_residual},
          {"inputs", inputs}};
}

RegressionModel model_from_json(const nlohmann::json& j) {
  RegressionModel m{kernel_choice_from_json(j.at("kernel")), matrix_from_json(j.at("coefficients")),
                    j.at("ridge").get<double>(), {}, j.value("relative_residual", 0.0)};
  for (const auto& x : j.at("inputs")) m.inputs.push_back(density_from_json(x));
  if (static_cast<Eigen::Index>(m.inputs.size()) != m.coefficients.rows()) {
    throw ShapeError("model_from_json: one coefficient row per training input required");
  }
  if (m.coefficients.cols() != block_dim(m.kernel) && !std::holds_alternative<ScalarKernel>(m.kernel)) {
    throw ShapeError("model_from_json: coefficient width disagrees with kernel output dimension");
  }
  return m;
}

}  // namespace qovk
