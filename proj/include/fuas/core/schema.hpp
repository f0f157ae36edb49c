#pragma once

#include <algorithm>
#include <array>
#include <string_view>

namespace fuas {

/// Treatment-plan keys, in their fixed rendering order.
inline constexpr std::array<std::string_view, 10> kPlanKeys = {
    "target_lesion_id",       "ablation_strategy", "acoustic_power",  "sonication_duration",
    "cooling_interval",       "predicted_total_energy", "treatment_order", "patient_position",
    "safety_margin",          "intraoperative_warnings"};

/// Facts about a case that guideline rules may condition on. Clinical variables
/// come from the case document; the rest from tool observations.
inline constexpr std::array<std::string_view, 9> kCaseFactKeys = {
    "bmi",          "abdominal_wall_thickness_mm", "preop_score",         "age",
    "multiplicity", "lesion_volume_mm3",           "oar_min_distance_mm", "predicted_dose_J",
    "dose_band"};

inline bool is_plan_key(std::string_view k) {
  return std::find(kPlanKeys.begin(), kPlanKeys.end(), k) != kPlanKeys.end();
}

inline bool is_case_fact_key(std::string_view k) {
  return std::find(kCaseFactKeys.begin(), kCaseFactKeys.end(), k) != kCaseFactKeys.end();
}

}  // namespace fuas
