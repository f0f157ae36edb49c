#include "fuas/dosemodel/lasso.hpp"

#include <cmath>

#include "fuas/core/error.hpp"

namespace fuas::dose {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& f, const Standardization& s) {
  Eigen::MatrixXd z = f.rowwise() - s.mean.transpose();
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    if (s.scale[j] > 0)
      z.col(j) /= s.scale[j];
    else
      z.col(j).setZero();
  }
  return z;
}

void check_inputs(const Eigen::MatrixXd& f, const Eigen::VectorXd& y) {
  if (f.rows() != y.size()) throw Error(ErrorCode::InvalidValue, "feature rows differ from target length");
  if (f.rows() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no samples");
  if (!f.allFinite() || !y.allFinite()) throw Error(ErrorCode::NonFiniteInput, "LASSO input has NaN/Inf");
}

}  // namespace

Eigen::VectorXd LassoFit::predict(const Eigen::MatrixXd& f) const {
  return (f * weights).array() + intercept;
}

Standardization standardization(const Eigen::MatrixXd& f) {
  Standardization s;
  s.mean = f.colwise().mean().transpose();
  s.scale.resize(f.cols());
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    const double var = (f.col(j).array() - s.mean[j]).square().mean();
    // Relative cut so columns that are constant up to rounding count as constant.
    const double tiny = 1e-24 * std::max(1.0, s.mean[j] * s.mean[j]);
    s.scale[j] = var > tiny ? std::sqrt(var) : 0.0;
  }
  return s;
}

double lambda_max(const Eigen::MatrixXd& f, const Eigen::VectorXd& y) {
  check_inputs(f, y);
  const auto z = standardize(f, standardization(f));
  const Eigen::VectorXd yc = y.array() - y.mean();
  // Same per-column expression as the first coordinate-descent sweep, so
  // lambda == lambda_max reproduces the zero solution bit for bit.
  double best = 0;
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    best = std::max(best, std::abs(z.col(j).dot(yc) / static_cast<double>(f.rows())));
  return best;
}

LassoFit lasso_fit(const Eigen::MatrixXd& f, const Eigen::VectorXd& y, double lambda, LassoOptions opts) {
  check_inputs(f, y);
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidValue, "lambda must be finite and >= 0");
  const auto n = static_cast<double>(f.rows());
  const Eigen::Index d = f.cols();

  LassoFit fit;
  fit.lambda = lambda;
  const Standardization s = standardization(f);
  fit.column_mean = s.mean;
  fit.column_scale = s.scale;
  const Eigen::MatrixXd z = standardize(f, s);
  const double ybar = y.mean();
  Eigen::VectorXd residual = y.array() - ybar;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);

  for (fit.sweeps = 0; fit.sweeps < opts.max_sweeps;) {
    ++fit.sweeps;
    double max_change = 0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (s.scale[j] == 0) continue;
      // z_j^T z_j / N == 1 after standardization.
      const double rho = z.col(j).dot(residual) / n + w[j];
      const double updated = soft_threshold(rho, lambda);
      const double delta = updated - w[j];
      if (delta != 0) {
        residual.noalias() -= delta * z.col(j);
        w[j] = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change < opts.tolerance) break;
  }

  fit.standardized_weights = w;
  fit.objective = residual.squaredNorm() / (2 * n) + lambda * w.lpNorm<1>();
  fit.weights = Eigen::VectorXd::Zero(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    if (w[j] == 0) continue;
    fit.weights[j] = w[j] / s.scale[j];
    fit.selected.push_back(static_cast<std::size_t>(j));
  }
  fit.intercept = ybar - fit.weights.dot(s.mean);
  if (!std::isfinite(fit.objective)) throw Error(ErrorCode::NonFiniteInput, "LASSO objective diverged");
  return fit;
}

std::vector<double> lambda_grid(double lmax, int points, double ratio) {
  std::vector<double> out;
  if (points <= 0) return out;
  if (points == 1 || lmax <= 0) return std::vector<double>(static_cast<std::size_t>(points), lmax);
  const double step = std::log(ratio) / (points - 1);
  for (int i = 0; i < points; ++i) out.push_back(lmax * std::exp(step * i));
  return out;
}

CrossValidation lasso_cv(const Eigen::MatrixXd& f, const Eigen::VectorXd& y, int folds, int points) {
  check_inputs(f, y);
  if (folds < 2 || f.rows() < folds) throw Error(ErrorCode::InvalidValue, "need at least `folds` samples and folds >= 2");
  CrossValidation cv;
  cv.lambdas = lambda_grid(lambda_max(f, y), points);
  cv.mean_mse.assign(cv.lambdas.size(), 0.0);

  for (int k = 0; k < folds; ++k) {
    std::vector<Eigen::Index> train, test;
    for (Eigen::Index i = 0; i < f.rows(); ++i) (i % folds == k ? test : train).push_back(i);
    const Eigen::MatrixXd ftrain = f(train, Eigen::all);
    const Eigen::VectorXd ytrain = y(train);
    const Eigen::MatrixXd ftest = f(test, Eigen::all);
    const Eigen::VectorXd ytest = y(test);
    for (std::size_t l = 0; l < cv.lambdas.size(); ++l) {
      const auto fit = lasso_fit(ftrain, ytrain, cv.lambdas[l]);
      cv.mean_mse[l] += (fit.predict(ftest) - ytest).squaredNorm() / static_cast<double>(test.size()) / folds;
    }
  }
  std::size_t best = 0;
  for (std::size_t l = 1; l < cv.lambdas.size(); ++l)
    if (cv.mean_mse[l] < cv.mean_mse[best]) best = l;
  cv.best_lambda = cv.lambdas[best];
  return cv;
}

}  // namespace fuas::dose
