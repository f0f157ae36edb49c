#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fuas/core/predicate.hpp"

namespace fuas::strategy {

enum class AblationStrategy { CenterToPeriphery, PeripheryToCenter, Staged };
enum class PatientPosition { Supine, Prone };

std::string_view to_string(AblationStrategy s);
std::string_view to_string(PatientPosition p);

/// The ten structured plan parameters, keyed as in kPlanKeys.
struct PlanParameters {
  std::string target_lesion_id = "L1";
  AblationStrategy ablation_strategy = AblationStrategy::CenterToPeriphery;
  double acoustic_power = 0;          // W
  double sonication_duration = 0;     // s
  double cooling_interval = 0;        // s
  double predicted_total_energy = 0;  // J
  std::vector<std::string> treatment_order{"L1"};
  PatientPosition patient_position = PatientPosition::Prone;
  double safety_margin = 0;  // mm
  std::vector<std::string> intraoperative_warnings;

  bool operator==(const PlanParameters&) const = default;
  /// Throws BadValue(key) when an invariant fails.
  void validate() const;
  /// Scalar view for predicate checks: numbers stay numeric, lists are
  /// comma-joined, warnings also expose their count under "intraoperative_warnings".
  FieldMap fields() const;
};

/// Reasoning trace followed by the structured plan.
struct TreatmentPlan {
  std::string reasoning_trace;
  PlanParameters plan;

  bool operator==(const TreatmentPlan&) const = default;
};

/// "REASONING:\n<trace>\n\nPLAN:\n<key>: <value>" lines in kPlanKeys order.
std::string render_plan(const TreatmentPlan& p);

/// Throws MissingBlock, MissingKey(name) or BadValue(key).
TreatmentPlan parse_plan(std::string_view text);

/// Overwrites individual keys with textual values (same syntax as the PLAN
/// block) and re-validates. Throws UnknownPlanField or BadValue.
PlanParameters apply_patch(const PlanParameters& p, const std::map<std::string, std::string>& patch);

}  // namespace fuas::strategy
