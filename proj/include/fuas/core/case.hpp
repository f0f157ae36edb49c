#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fuas {

struct ClinicalVariables {
  double bmi = 22.0;                       // kg/m^2, in (10, 80)
  double abdominal_wall_thickness_mm = 20;  // >= 0
  double preop_score = 0;                   // ordinal, >= 0
  double age = 40;                          // years

  /// Throws InvalidValue when a field is out of range or non-finite.
  void validate() const;
  bool operator==(const ClinicalVariables&) const = default;
};

inline constexpr std::string_view kClinicalNames[] = {"bmi", "abdominal_wall_thickness_mm", "preop_score", "age"};

/// One planning request: imaging reference, free-text record and clinician query.
struct CaseInput {
  std::string case_id;
  std::string volume_ref;
  std::string ehr_text;
  std::string clinician_query;
  ClinicalVariables clinical_vars;
  std::vector<std::string> oar_refs;
  /// Existing lesion mask; when present the planner loads it instead of segmenting.
  std::optional<std::string> mask_ref;

  bool operator==(const CaseInput&) const = default;
};

/// Throws MissingField(name) or MalformedDocument.
CaseInput parse_case(std::string_view json_text);
std::string serialize_case(const CaseInput& c);

}  // namespace fuas
