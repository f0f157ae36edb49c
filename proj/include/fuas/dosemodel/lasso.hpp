#pragma once

#include <vector>

#include <Eigen/Core>

namespace fuas::dose {

struct LassoOptions {
  double tolerance = 1e-8;  // max absolute coordinate change per sweep
  int max_sweeps = 10000;
};

/// Solution of min_w (1/2N)||y - Fw||^2 + lambda ||w||_1 on internally
/// standardized columns. `weights`/`intercept` are in the original column scale.
struct LassoFit {
  Eigen::VectorXd weights;
  double intercept = 0;
  double lambda = 0;
  std::vector<std::size_t> selected;  // indices with weights != 0

  Eigen::VectorXd standardized_weights;
  Eigen::VectorXd column_mean;
  Eigen::VectorXd column_scale;  // population std; 0 marks a constant column
  double objective = 0;          // standardized problem
  int sweeps = 0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& f) const;
};

/// Column means and population standard deviations.
struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
};
Standardization standardization(const Eigen::MatrixXd& f);

/// Smallest lambda with an all-zero solution: max_j |z_j^T (y - ybar)| / N on standardized columns.
double lambda_max(const Eigen::MatrixXd& f, const Eigen::VectorXd& y);

/// Cyclic coordinate descent. Throws NonFiniteInput, InvalidValue (lambda < 0, shape).
LassoFit lasso_fit(const Eigen::MatrixXd& f, const Eigen::VectorXd& y, double lambda, LassoOptions opts = {});

/// 50-point log grid from lambda_max down to lambda_max * 1e-3.
std::vector<double> lambda_grid(double lambda_max, int points = 50, double ratio = 1e-3);

struct CrossValidation {
  std::vector<double> lambdas;
  std::vector<double> mean_mse;
  double best_lambda = 0;
};

/// k-fold CV over lambda_grid; fold of row i is i mod k.
CrossValidation lasso_cv(const Eigen::MatrixXd& f, const Eigen::VectorXd& y, int folds = 5, int points = 50);

}  // namespace fuas::dose
