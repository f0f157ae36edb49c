#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fuas/core/case.hpp"
#include "fuas/dosemodel/boosting.hpp"
#include "fuas/dosemodel/icc.hpp"
#include "fuas/dosemodel/lasso.hpp"
#include "fuas/dosemodel/table.hpp"
#include "fuas/radiomics/features.hpp"

namespace fuas::dose {

enum class DoseBand { Low, Medium, High };
std::string_view to_string(DoseBand b);

/// Band edges in joules: below `low_below` is low, at or above `high_from` is high.
struct DoseBands {
  double low_below = 15000;
  double high_from = 35000;

  DoseBand classify(double joules) const;
};

/// Fused regressor over (selected radiomics features ‖ clinical variables).
struct DoseModel {
  std::string model_version = "unversioned";
  std::vector<std::string> selected_features;
  BoostedEnsemble ensemble;
  /// Training-median dose; the positive class for AUC evaluation is dose >= this.
  double high_dose_label_threshold = 0;

  std::vector<std::string> input_names() const;
};

struct DoseObservation {
  double predicted_dose_J = 0;
  DoseBand band = DoseBand::Medium;
  std::string model_version;

  bool operator==(const DoseObservation&) const = default;
  /// "DOSE: predicted_J=..; band=..; model=.."
  std::string to_text() const;
};

/// ŷ = base + η Σ tree(f* ⊕ c). Throws SchemaMismatch when `selected` has the
/// wrong length.
DoseObservation predict_dose(const DoseModel& model, std::span<const double> selected, const ClinicalVariables& c,
                             const DoseBands& bands = {});

/// Picks the model's selected features by name. Throws SchemaMismatch.
DoseObservation predict_dose(const DoseModel& model, const radiomics::FeatureVector& f, const ClinicalVariables& c,
                             const DoseBands& bands = {});

/// Versioned JSON document with trees in nested-split form.
std::string serialize_model(const DoseModel& m);
DoseModel parse_model(std::string_view json_text);

struct TrainingOptions {
  double icc_threshold = 0.75;
  std::optional<double> lambda;  // cross-validated when unset
  int cv_folds = 5;
  int cv_points = 50;
  BoostParams boost{};
  std::string model_version = "fuas-dose-1";
};

struct TrainingReport {
  DoseModel model;
  IccResult icc;
  LassoFit lasso;
  std::vector<std::string> retained_features;  // after ICC
  std::vector<double> train_rmse;
};

/// ICC filter -> LASSO selection -> boosted fusion with clinical variables.
/// `replicates` are the feature matrices re-extracted under mask jitter.
TrainingReport train_dose_model(const TrainingTable& table, const std::vector<Eigen::MatrixXd>& replicates,
                                const TrainingOptions& opts = {});

}  // namespace fuas::dose
