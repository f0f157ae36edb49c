#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fuas {

using FieldValue = std::variant<double, std::string>;
using FieldMap = std::map<std::string, FieldValue, std::less<>>;

enum class Comparator { Lt, Le, Gt, Ge, Eq, Ne, In };

std::string_view to_string(Comparator c);

/// `field cmp bound`, e.g. "safety_margin >= 10" or "patient_position in {prone, supine}".
struct Predicate {
  std::string field;
  Comparator cmp = Comparator::Eq;
  std::variant<double, std::string, std::vector<std::string>> bound;

  /// Throws InvalidValue for a bound/value type mismatch (e.g. "<" on text).
  bool holds(const FieldValue& value) const;
  /// False when the field is absent.
  bool holds_in(const FieldMap& fields) const;
  std::string to_string() const;

  bool operator==(const Predicate&) const = default;
};

/// Parses "field cmp value"; comparators <, <=, >, >=, ==, =, !=, in (plus the
/// unicode forms ≤ ≥ ∈). Throws MalformedDocument.
Predicate parse_predicate(std::string_view text);

std::string format_number(double v);
std::string format_field(const FieldValue& v);

}  // namespace fuas
