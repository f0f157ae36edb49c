#include "fuas/dosemodel/icc.hpp"

#include "fuas/core/error.hpp"

namespace fuas::dose {

std::optional<double> icc_1_1(const Eigen::MatrixXd& ratings) {
  const auto n = static_cast<double>(ratings.rows());
  const auto k = static_cast<double>(ratings.cols());
  if (ratings.rows() < 2 || ratings.cols() < 2) return std::nullopt;
  const Eigen::VectorXd subject_mean = ratings.rowwise().mean();
  const double grand = ratings.mean();
  const double ss_between = k * (subject_mean.array() - grand).square().sum();
  const double ss_within = (ratings.colwise() - subject_mean).squaredNorm();
  if (ss_between + ss_within <= 0) return std::nullopt;
  const double ms_between = ss_between / (n - 1);
  const double ms_within = ss_within / (n * (k - 1));
  return (ms_between - ms_within) / (ms_between + (k - 1) * ms_within);
}

IccResult icc_filter(const std::vector<Eigen::MatrixXd>& replicates, double threshold) {
  if (replicates.size() < 2) throw Error(ErrorCode::TooFewReplicates, "ICC needs at least 2 replicates");
  const auto n = replicates[0].rows();
  const auto d = replicates[0].cols();
  for (const auto& r : replicates)
    if (r.rows() != n || r.cols() != d) throw Error(ErrorCode::SchemaMismatch, "replicate shapes differ");

  IccResult out;
  Eigen::MatrixXd ratings(n, static_cast<Eigen::Index>(replicates.size()));
  for (Eigen::Index c = 0; c < d; ++c) {
    for (std::size_t r = 0; r < replicates.size(); ++r) ratings.col(static_cast<Eigen::Index>(r)) = replicates[r].col(c);
    const auto icc = icc_1_1(ratings);
    out.icc.push_back(icc);
    if (icc && *icc >= threshold) out.retained.push_back(static_cast<std::size_t>(c));
  }
  return out;
}

}  // namespace fuas::dose
