#include "fuas/dosemodel/dose.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "fuas/core/error.hpp"
#include "fuas/core/stats.hpp"

namespace fuas::dose {

using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kModelFormat = "fuas-dose-model";
constexpr int kModelFormatVersion = 1;

json tree_to_json(const RegressionTree& t, int node, const std::vector<std::string>& names) {
  const auto& n = t.nodes[static_cast<std::size_t>(node)];
  if (n.feature < 0) return {{"leaf", n.value}};
  json j;
  j["split"] = {{"input", names[static_cast<std::size_t>(n.feature)]}, {"index", n.feature}, {"threshold", n.threshold}};
  j["left"] = tree_to_json(t, n.left, names);
  j["right"] = tree_to_json(t, n.right, names);
  return j;
}

int tree_from_json(RegressionTree& t, const json& j, std::size_t n_inputs) {
  const int id = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  if (j.contains("leaf")) {
    t.nodes.back().value = j.at("leaf").get<double>();
    return id;
  }
  const auto& split = j.at("split");
  const int feature = split.at("index").get<int>();
  if (feature < 0 || static_cast<std::size_t>(feature) >= n_inputs)
    throw Error(ErrorCode::SchemaMismatch, "tree split references input " + std::to_string(feature));
  const double threshold = split.at("threshold").get<double>();
  const int l = tree_from_json(t, j.at("left"), n_inputs);
  const int r = tree_from_json(t, j.at("right"), n_inputs);
  auto& node = t.nodes[static_cast<std::size_t>(id)];
  node.feature = feature;
  node.threshold = threshold;
  node.left = l;
  node.right = r;
  return id;
}

}  // namespace

std::string_view to_string(DoseBand b) {
  switch (b) {
    case DoseBand::Low: return "low";
    case DoseBand::Medium: return "medium";
    case DoseBand::High: return "high";
  }
  return "?";
}

DoseBand DoseBands::classify(double joules) const {
  if (joules < low_below) return DoseBand::Low;
  if (joules >= high_from) return DoseBand::High;
  return DoseBand::Medium;
}

std::vector<std::string> DoseModel::input_names() const {
  std::vector<std::string> out = selected_features;
  for (auto n : kClinicalNames) out.emplace_back(n);
  return out;
}

std::string DoseObservation::to_text() const {
  return "DOSE: predicted_J=" + fixed(predicted_dose_J) + "; band=" + std::string(to_string(band)) +
         "; model=" + model_version;
}

DoseObservation predict_dose(const DoseModel& model, std::span<const double> selected, const ClinicalVariables& c,
                             const DoseBands& bands) {
  if (selected.size() != model.selected_features.size())
    throw Error(ErrorCode::SchemaMismatch, "expected " + std::to_string(model.selected_features.size()) +
                                               " selected features, got " + std::to_string(selected.size()));
  std::vector<double> x(selected.begin(), selected.end());
  x.insert(x.end(), {c.bmi, c.abdominal_wall_thickness_mm, c.preop_score, c.age});
  for (double v : x)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "dose model input is not finite");
  const double y = model.ensemble.predict(x);
  return {y, bands.classify(y), model.model_version};
}

DoseObservation predict_dose(const DoseModel& model, const radiomics::FeatureVector& f, const ClinicalVariables& c,
                             const DoseBands& bands) {
  std::vector<double> selected;
  for (const auto& name : model.selected_features) selected.push_back(f.value(name));
  return predict_dose(model, selected, c, bands);
}

std::string serialize_model(const DoseModel& m) {
  json doc;
  doc["format"] = kModelFormat;
  doc["format_version"] = kModelFormatVersion;
  doc["model_version"] = m.model_version;
  doc["selected_features"] = m.selected_features;
  doc["inputs"] = m.input_names();
  doc["base"] = m.ensemble.base;
  doc["learning_rate"] = m.ensemble.learning_rate;
  doc["high_dose_label_threshold"] = m.high_dose_label_threshold;
  doc["trees"] = json::array();
  const auto names = m.input_names();
  for (const auto& t : m.ensemble.trees) doc["trees"].push_back(tree_to_json(t, 0, names));
  return doc.dump(1);
}

DoseModel parse_model(std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::MalformedDocument, "model is not a JSON object");
  try {
    if (doc.at("format").get<std::string>() != kModelFormat || doc.at("format_version").get<int>() != kModelFormatVersion)
      throw Error(ErrorCode::MalformedDocument, "unsupported model format");
    DoseModel m;
    m.model_version = doc.at("model_version").get<std::string>();
    m.selected_features = doc.at("selected_features").get<std::vector<std::string>>();
    if (doc.at("inputs").get<std::vector<std::string>>() != m.input_names())
      throw Error(ErrorCode::SchemaMismatch, "model inputs disagree with selected features + clinical variables");
    m.ensemble.base = doc.at("base").get<double>();
    m.ensemble.learning_rate = doc.at("learning_rate").get<double>();
    m.high_dose_label_threshold = doc.value("high_dose_label_threshold", 0.0);
    const auto n_inputs = m.input_names().size();
    for (const auto& t : doc.at("trees")) {
      RegressionTree tree;
      tree_from_json(tree, t, n_inputs);
      m.ensemble.trees.push_back(std::move(tree));
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
}

TrainingReport train_dose_model(const TrainingTable& table, const std::vector<Eigen::MatrixXd>& replicates,
                                const TrainingOptions& opts) {
  table.validate();
  if (table.rows() == 0) throw Error(ErrorCode::EmptyTrainingSet, "training table is empty");

  TrainingReport rep;
  rep.icc = icc_filter(replicates, opts.icc_threshold);
  for (auto c : rep.icc.retained) rep.retained_features.push_back(table.feature_names[c]);

  std::vector<Eigen::Index> retained(rep.icc.retained.begin(), rep.icc.retained.end());
  std::vector<Eigen::Index> selected;
  if (!retained.empty()) {
    const Eigen::MatrixXd f = table.features(Eigen::all, retained);
    const double lambda = opts.lambda ? *opts.lambda : lasso_cv(f, table.dose, opts.cv_folds, opts.cv_points).best_lambda;
    rep.lasso = lasso_fit(f, table.dose, lambda);
    for (auto j : rep.lasso.selected) selected.push_back(retained[j]);
  }

  DoseModel& m = rep.model;
  m.model_version = opts.model_version;
  for (auto j : selected) m.selected_features.push_back(table.feature_names[static_cast<std::size_t>(j)]);
  Eigen::MatrixXd x(table.rows(), static_cast<Eigen::Index>(selected.size()) + 4);
  x.leftCols(static_cast<Eigen::Index>(selected.size())) = table.features(Eigen::all, selected);
  x.rightCols(4) = table.clinical;
  auto boosted = boosted_fit(x, table.dose, opts.boost);
  m.ensemble = std::move(boosted.model);
  rep.train_rmse = std::move(boosted.train_rmse);

  std::vector<double> d(table.dose.data(), table.dose.data() + table.dose.size());
  m.high_dose_label_threshold = percentile_inplace(d, 50.0);
  return rep;
}

}  // namespace fuas::dose
