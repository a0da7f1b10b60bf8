#pragma once

#include <Eigen/Dense>

namespace sqcqp {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// min ||A x - y||_2 subject to x >= 0, by the Lawson-Hanson active-set
// method. Dense and small-scale; tol < 0 picks a default from the data.
NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                double tol = -1.0, int max_iter = -1);

}  // namespace sqcqp
