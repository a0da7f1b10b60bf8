#include "sqcqp/nnls.hpp"

#include <limits>
#include <vector>

namespace sqcqp {

namespace {

// Least squares restricted to the passive columns; zeros elsewhere.
Eigen::VectorXd restricted_ls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                              const std::vector<int>& passive) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(A.cols());
  if (passive.empty()) return z;
  Eigen::MatrixXd Ap(A.rows(), static_cast<int>(passive.size()));
  for (size_t j = 0; j < passive.size(); ++j) Ap.col(static_cast<int>(j)) = A.col(passive[j]);
  Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(y);
  for (size_t j = 0; j < passive.size(); ++j) z[passive[j]] = zp[static_cast<int>(j)];
  return z;
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double tol, int max_iter) {
  const int n = static_cast<int>(A.cols());
  if (tol < 0.0) {
    const double anorm = A.size() ? A.cwiseAbs().maxCoeff() : 0.0;
    tol = 10.0 * std::numeric_limits<double>::epsilon() * anorm *
          static_cast<double>(std::max<Eigen::Index>(A.rows(), A.cols()));
  }
  if (max_iter < 0) max_iter = 3 * std::max(n, 1);

  NnlsResult res;
  res.x = Eigen::VectorXd::Zero(n);
  std::vector<bool> in_passive(n, false);
  std::vector<int> passive;

  for (int iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter;
    const Eigen::VectorXd w = A.transpose() * (y - A * res.x);

    int t = -1;
    double wmax = tol;
    for (int j = 0; j < n; ++j)
      if (!in_passive[j] && w[j] > wmax) {
        wmax = w[j];
        t = j;
      }
    if (t < 0) {
      res.converged = true;
      break;
    }
    in_passive[t] = true;
    passive.push_back(t);

    // Inner loop: back off along the segment until the trial is nonnegative.
    while (true) {
      Eigen::VectorXd z = restricted_ls(A, y, passive);
      bool all_pos = true;
      for (int j : passive)
        if (z[j] <= 0.0) all_pos = false;
      if (all_pos) {
        res.x = z;
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (int j : passive)
        if (z[j] <= 0.0) alpha = std::min(alpha, res.x[j] / (res.x[j] - z[j]));
      res.x += alpha * (z - res.x);
      std::vector<int> keep;
      for (int j : passive) {
        if (res.x[j] > tol)
          keep.push_back(j);
        else {
          res.x[j] = 0.0;
          in_passive[j] = false;
        }
      }
      passive = keep;
      if (passive.empty()) break;
    }
  }

  res.residual_norm = (A * res.x - y).norm();
  return res;
}

}  // namespace sqcqp
