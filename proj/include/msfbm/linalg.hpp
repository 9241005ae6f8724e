#pragma once

#include <vector>

#include <Eigen/Core>

namespace msfbm {

/// Diagonal shifts tried in order, as multiples of max(diag G).
struct JitterPolicy {
  std::vector<double> ladder{0.0, 1e-14, 1e-12, 1e-10};
};

/// L with L L^T = G + jitter * I.
struct PsdFactor {
  Eigen::MatrixXd lower;
  double jitter = 0.0;           // absolute shift added to the diagonal
  double relative_jitter = 0.0;  // the ladder rung that succeeded
};

/// Cholesky factor of a symmetric PSD matrix, escalating a diagonal jitter
/// through the policy ladder until the factorization succeeds. Throws
/// FactorizationFailure when every rung fails.
PsdFactor psd_factor(const Eigen::MatrixXd& gram, const JitterPolicy& policy = {});

}  // namespace msfbm
