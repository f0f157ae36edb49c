#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fuas/core/predicate.hpp"

namespace fuas::optimizer {

/// Hard physical limit on one plan field.
struct PhysicalConstraint {
  std::string constraint_id;
  Predicate predicate;  // predicate.field is a plan key
  std::string unit;
  std::string message;

  bool operator==(const PhysicalConstraint&) const = default;
};

/// P1 acoustic_power <= 400 W, P2 predicted_total_energy <= 60000 J,
/// P3 safety_margin >= 10 mm, P4 cooling_interval >= 5 s.
std::vector<PhysicalConstraint> default_constraints();

/// JSON array of {id, field, comparator, bound, unit?, message}. Throws
/// UnknownPlanField for a field outside the plan schema, ConfigError otherwise.
std::vector<PhysicalConstraint> parse_constraints(std::string_view json_text);
std::string serialize_constraints(const std::vector<PhysicalConstraint>& cs);
std::vector<PhysicalConstraint> load_constraints(const std::filesystem::path& path);

}  // namespace fuas::optimizer
