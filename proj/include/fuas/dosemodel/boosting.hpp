#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fuas::dose {

/// Binary regression tree stored as a flat node array; node 0 is the root.
/// Samples with x[feature] <= threshold go left.
struct RegressionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;
  };
  std::vector<Node> nodes;

  double predict(std::span<const double> x) const;
  int depth() const;
};

struct BoostParams {
  int n_trees = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_leaf = 1;
};

/// Least-squares stagewise boosting: base = mean(y), tree m fits the residuals
/// of the first m-1 stages.
struct BoostedEnsemble {
  double base = 0;
  double learning_rate = 0.1;
  std::vector<RegressionTree> trees;

  double predict(std::span<const double> x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

struct BoostResult {
  BoostedEnsemble model;
  std::vector<double> train_rmse;  // index m = RMSE after m trees (m = 0 is the base)
};

/// Throws EmptyTrainingSet, InvalidValue for bad params or shapes.
BoostResult boosted_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const BoostParams& params);

/// Greedy least-squares tree on (x, target), used as the boosting base learner.
RegressionTree fit_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& target, int max_depth, int min_leaf);

double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace fuas::dose
