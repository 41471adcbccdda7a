#pragma once

// Kernel ridge regression over the complex field with operator-valued
// kernels, and the scalar-kernel baseline that solves p decoupled problems
// sharing one Gram matrix.

#include <vector>

#include "qovk/clinalg.hpp"
#include "qovk/qkernels.hpp"
#include "qovk/qstates.hpp"

namespace qovk {

/// Column-major flattening of a square matrix.
ComplexVector vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(const ComplexVector& v, Eigen::Index b);

struct TrainingSet {
  std::vector<DensityMatrix> inputs;
  std::vector<ComplexVector> labels;

  void validate() const;
  Eigen::Index label_dim() const { return labels.empty() ? 0 : labels.front().size(); }
};

struct RegressionModel {
  KernelChoice kernel;
  /// n x p; row i holds c_i.
  ComplexMatrix coefficients;
  double ridge = 0.0;
  std::vector<DensityMatrix> inputs;
  /// ||(G + ridge I) c - y|| / ||y|| at fit time.
  double relative_residual = 0.0;
};

RegressionModel fit(const TrainingSet& ts, const KernelChoice& kernel, double ridge,
                    const Tolerance& tol = kDefaultTolerance);

/// sum_i K(x, x_i) c_i.
ComplexVector predict(const RegressionModel& m, const DensityMatrix& x);

nlohmann::json training_set_to_json(const TrainingSet& ts);
TrainingSet training_set_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const RegressionModel& m);
RegressionModel model_from_json(const nlohmann::json& j);

}  // namespace qovk
