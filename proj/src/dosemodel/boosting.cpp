#include "fuas/dosemodel/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fuas/core/error.hpp"

namespace fuas::dose {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0;
  double gain = 0;
};

Split best_split(const Eigen::MatrixXd& x, const Eigen::VectorXd& t, const std::vector<Eigen::Index>& rows,
                 int min_leaf) {
  Split best;
  const auto n = rows.size();
  if (n < 2 * static_cast<std::size_t>(min_leaf)) return best;
  double total = 0;
  for (auto r : rows) total += t[r];
  const double parent = total * total / static_cast<double>(n);

  std::vector<Eigen::Index> order(rows);
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return x(a, f) < x(b, f); });
    double left = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left += t[order[i]];
      const std::size_t nl = i + 1, nr = n - nl;
      const double xl = x(order[i], f), xr = x(order[i + 1], f);
      if (xl == xr || nl < static_cast<std::size_t>(min_leaf) || nr < static_cast<std::size_t>(min_leaf)) continue;
      const double right = total - left;
      // SSE reduction = sum_L^2/n_L + sum_R^2/n_R - sum^2/n.
      const double gain = left * left / static_cast<double>(nl) + right * right / static_cast<double>(nr) - parent;
      if (gain > best.gain) {
        best.feature = static_cast<int>(f);
        best.threshold = xl + (xr - xl) / 2;
        best.gain = gain;
      }
    }
    order = rows;
  }
  return best;
}

int grow(RegressionTree& tree, const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
         const std::vector<Eigen::Index>& rows, int depth, int max_depth, int min_leaf) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  double sum = 0, sum_sq = 0;
  for (auto r : rows) {
    sum += t[r];
    sum_sq += t[r] * t[r];
  }
  tree.nodes[static_cast<std::size_t>(id)].value = sum / static_cast<double>(rows.size());
  if (depth >= max_depth) return id;

  const Split s = best_split(x, t, rows, min_leaf);
  // Relative floor keeps rounding noise from creating spurious splits.
  if (s.feature < 0 || s.gain <= 1e-12 * sum_sq) return id;
  std::vector<Eigen::Index> left, right;
  for (auto r : rows) (x(r, s.feature) <= s.threshold ? left : right).push_back(r);
  const int l = grow(tree, x, t, left, depth + 1, max_depth, min_leaf);
  const int rr = grow(tree, x, t, right, depth + 1, max_depth, min_leaf);
  auto& node = tree.nodes[static_cast<std::size_t>(id)];
  node.feature = s.feature;
  node.threshold = s.threshold;
  node.left = l;
  node.right = rr;
  return id;
}

}  // namespace

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0)
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                                                     : nodes[i].right);
  return nodes[i].value;
}

int RegressionTree::depth() const {
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int best = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.feature >= 0) {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return best;
}

double BoostedEnsemble::predict(std::span<const double> x) const {
  double sum = 0;
  for (const auto& t : trees) sum += t.predict(x);
  return base + learning_rate * sum;
}

Eigen::VectorXd BoostedEnsemble::predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) row[static_cast<std::size_t>(c)] = x(r, c);
    out[r] = predict(row);
  }
  return out;
}

RegressionTree fit_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& target, int max_depth, int min_leaf) {
  if (x.rows() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no samples");
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), 0);
  RegressionTree tree;
  grow(tree, x, target, rows, 0, max_depth, min_leaf);
  return tree;
}

double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

BoostResult boosted_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const BoostParams& p) {
  if (x.rows() == 0 || y.size() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no samples");
  if (x.rows() != y.size()) throw Error(ErrorCode::InvalidValue, "feature rows differ from target length");
  if (p.n_trees < 0 || p.max_depth < 0 || p.min_leaf < 1 || !(p.learning_rate > 0))
    throw Error(ErrorCode::InvalidValue, "invalid boosting parameters");
  if (!x.allFinite() || !y.allFinite()) throw Error(ErrorCode::NonFiniteInput, "boosting input has NaN/Inf");

  BoostResult out;
  out.model.base = y.mean();
  out.model.learning_rate = p.learning_rate;
  Eigen::VectorXd pred = Eigen::VectorXd::Constant(y.size(), out.model.base);
  out.train_rmse.push_back(rmse(pred, y));
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (int m = 0; m < p.n_trees; ++m) {
    const Eigen::VectorXd residual = y - pred;
    RegressionTree tree = fit_tree(x, residual, p.max_depth, p.min_leaf);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      for (Eigen::Index c = 0; c < x.cols(); ++c) row[static_cast<std::size_t>(c)] = x(r, c);
      pred[r] += p.learning_rate * tree.predict(row);
    }
    out.model.trees.push_back(std::move(tree));
    out.train_rmse.push_back(rmse(pred, y));
  }
  return out;
}

}  // namespace fuas::dose
