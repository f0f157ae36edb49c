#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace fuas::dose {

/// Radiomics features, clinical variables and treatment dose per sample.
/// CSV layout: feature columns, then the four clinical columns, then dose_J.
struct TrainingTable {
  std::vector<std::string> feature_names;
  Eigen::MatrixXd features;  // n x d
  Eigen::MatrixXd clinical;  // n x 4, columns in kClinicalNames order
  Eigen::VectorXd dose;      // joules

  Eigen::Index rows() const { return dose.size(); }
  /// Throws InvalidValue / NonFiniteInput / SchemaMismatch.
  void validate() const;
};

inline constexpr std::string_view kDoseColumn = "dose_J";

TrainingTable parse_training_csv(std::string_view text);
std::string to_csv(const TrainingTable& t);

}  // namespace fuas::dose
