#include "fuas/optimizer/constraints.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "fuas/core/error.hpp"
#include "fuas/core/schema.hpp"
#include "fuas/core/volume_io.hpp"

namespace fuas::optimizer {

using nlohmann::ordered_json;

namespace {

PhysicalConstraint make(std::string id, std::string_view predicate, std::string unit, std::string message) {
  return {std::move(id), parse_predicate(predicate), std::move(unit), std::move(message)};
}

std::string bound_text(const ordered_json& b) {
  if (b.is_number()) return format_number(b.get<double>());
  if (b.is_string()) return b.get<std::string>();
  if (b.is_array()) {
    std::string out = "{";
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (!b[i].is_string()) throw Error(ErrorCode::ConfigError, "set bounds must hold strings");
      out += (i ? ", " : "") + b[i].get<std::string>();
    }
    return out + "}";
  }
  throw Error(ErrorCode::ConfigError, "bound must be a number, string or array");
}

}  // namespace

std::vector<PhysicalConstraint> default_constraints() {
  return {make("P1", "acoustic_power <= 400", "W", "Acoustic power exceeds the transducer limit of 400 W"),
          make("P2", "predicted_total_energy <= 60000", "J", "Total energy exceeds the 60 kJ session limit"),
          make("P3", "safety_margin >= 10", "mm", "Safety margin below 10 mm"),
          make("P4", "cooling_interval >= 5", "s", "Cooling interval shorter than 5 s")};
}

std::vector<PhysicalConstraint> parse_constraints(std::string_view json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("constraint file: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::ConfigError, "constraint file must be a JSON array");
  std::vector<PhysicalConstraint> out;
  std::set<std::string> ids;
  for (const auto& e : doc) {
    if (!e.is_object()) throw Error(ErrorCode::ConfigError, "constraint entries must be objects");
    for (const char* key : {"id", "field", "comparator", "bound", "message"})
      if (!e.contains(key)) throw Error(ErrorCode::ConfigError, std::string("constraint missing ") + key);
    if (!e["id"].is_string() || !e["field"].is_string() || !e["comparator"].is_string() || !e["message"].is_string())
      throw Error(ErrorCode::ConfigError, "constraint id, field, comparator and message must be strings");
    const auto field = e["field"].get<std::string>();
    if (!is_plan_key(field)) throw Error(ErrorCode::UnknownPlanField, field);
    PhysicalConstraint c;
    c.constraint_id = e["id"].get<std::string>();
    if (c.constraint_id.empty() || !ids.insert(c.constraint_id).second)
      throw Error(ErrorCode::ConfigError, "constraint ids must be unique and non-empty");
    try {
      c.predicate = parse_predicate(field + " " + e["comparator"].get<std::string>() + " " + bound_text(e["bound"]));
    } catch (const Error& err) {
      throw Error(ErrorCode::ConfigError, "constraint " + c.constraint_id + ": " + err.detail());
    }
    if (e.contains("unit") && e["unit"].is_string()) c.unit = e["unit"].get<std::string>();
    c.message = e["message"].get<std::string>();
    out.push_back(std::move(c));
  }
  return out;
}

std::string serialize_constraints(const std::vector<PhysicalConstraint>& cs) {
  ordered_json doc = ordered_json::array();
  for (const auto& c : cs) {
    ordered_json e;
    e["id"] = c.constraint_id;
    e["field"] = c.predicate.field;
    e["comparator"] = std::string(to_string(c.predicate.cmp));
    std::visit([&](const auto& b) { e["bound"] = b; }, c.predicate.bound);
    e["unit"] = c.unit;
    e["message"] = c.message;
    doc.push_back(std::move(e));
  }
  return doc.dump(2);
}

std::vector<PhysicalConstraint> load_constraints(const std::filesystem::path& path) {
  const Bytes raw = read_file(path);
  return parse_constraints(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
}

}  // namespace fuas::optimizer
