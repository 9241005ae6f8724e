#include "msfbm/linalg.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "msfbm/errors.hpp"

namespace msfbm {

PsdFactor psd_factor(const Eigen::MatrixXd& gram, const JitterPolicy& policy) {
  if (gram.rows() != gram.cols() || gram.rows() == 0) {
    throw ValidationError("gram matrix must be square and nonempty");
  }
  if (!gram.allFinite()) throw FactorizationFailure("gram matrix has non-finite entries");
  const double scale = gram.diagonal().maxCoeff();
  if (!(scale > 0.0)) throw FactorizationFailure("gram matrix has no positive diagonal entry");

  for (double rung : policy.ladder) {
    Eigen::MatrixXd shifted = gram;
    const double eps = rung * scale;
    shifted.diagonal().array() += eps;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd lower = llt.matrixL();
    if (!lower.allFinite() || (lower.diagonal().array() <= 0.0).any()) continue;
    return {std::move(lower), eps, rung};
  }
  std::ostringstream msg;
  msg << "cholesky failed at every jitter level up to " << policy.ladder.back()
      << " * max diag (" << scale << ")";
  throw FactorizationFailure(msg.str());
}

}  // namespace msfbm
