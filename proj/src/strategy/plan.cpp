#include "fuas/strategy/plan.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "fuas/core/error.hpp"
#include "fuas/core/schema.hpp"

namespace fuas::strategy {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = text.find('\n');
    auto line = text.substr(0, pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return out;
}

std::string join(const std::vector<std::string>& xs, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

std::vector<std::string> split_list(std::string_view s, std::string_view sep) {
  std::vector<std::string> out;
  while (true) {
    const auto pos = s.find(sep);
    const auto item = trim(s.substr(0, pos));
    if (!item.empty()) out.emplace_back(item);
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + sep.size());
  }
  return out;
}

double parse_nonneg(std::string_view key, std::string_view v) {
  double x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x) || x < 0)
    throw Error(ErrorCode::BadValue, std::string(key) + " = '" + std::string(v) + "'");
  return x;
}

// Applies one textual key/value to the plan; shared by parse_plan and apply_patch.
void set_field(PlanParameters& p, std::string_view key, std::string_view value) {
  const auto bad = [&] { return Error(ErrorCode::BadValue, std::string(key) + " = '" + std::string(value) + "'"); };
  if (key == "target_lesion_id") {
    if (value.empty()) throw bad();
    p.target_lesion_id = std::string(value);
  } else if (key == "ablation_strategy") {
    if (value == "center_to_periphery") p.ablation_strategy = AblationStrategy::CenterToPeriphery;
    else if (value == "periphery_to_center") p.ablation_strategy = AblationStrategy::PeripheryToCenter;
    else if (value == "staged") p.ablation_strategy = AblationStrategy::Staged;
    else throw bad();
  } else if (key == "acoustic_power") {
    p.acoustic_power = parse_nonneg(key, value);
  } else if (key == "sonication_duration") {
    p.sonication_duration = parse_nonneg(key, value);
  } else if (key == "cooling_interval") {
    p.cooling_interval = parse_nonneg(key, value);
  } else if (key == "predicted_total_energy") {
    p.predicted_total_energy = parse_nonneg(key, value);
  } else if (key == "treatment_order") {
    p.treatment_order = split_list(value, ",");
  } else if (key == "patient_position") {
    if (value == "supine") p.patient_position = PatientPosition::Supine;
    else if (value == "prone") p.patient_position = PatientPosition::Prone;
    else throw bad();
  } else if (key == "safety_margin") {
    p.safety_margin = parse_nonneg(key, value);
  } else if (key == "intraoperative_warnings") {
    p.intraoperative_warnings = value == "none" ? std::vector<std::string>{} : split_list(value, " | ");
  } else {
    throw Error(ErrorCode::UnknownPlanField, std::string(key));
  }
}

std::string field_text(const PlanParameters& p, std::string_view key) {
  if (key == "target_lesion_id") return p.target_lesion_id;
  if (key == "ablation_strategy") return std::string(to_string(p.ablation_strategy));
  if (key == "acoustic_power") return format_number(p.acoustic_power);
  if (key == "sonication_duration") return format_number(p.sonication_duration);
  if (key == "cooling_interval") return format_number(p.cooling_interval);
  if (key == "predicted_total_energy") return format_number(p.predicted_total_energy);
  if (key == "treatment_order") return join(p.treatment_order, ",");
  if (key == "patient_position") return std::string(to_string(p.patient_position));
  if (key == "safety_margin") return format_number(p.safety_margin);
  if (key == "intraoperative_warnings")
    return p.intraoperative_warnings.empty() ? "none" : join(p.intraoperative_warnings, " | ");
  throw Error(ErrorCode::UnknownPlanField, std::string(key));
}

}  // namespace

std::string_view to_string(AblationStrategy s) {
  switch (s) {
    case AblationStrategy::CenterToPeriphery: return "center_to_periphery";
    case AblationStrategy::PeripheryToCenter: return "periphery_to_center";
    case AblationStrategy::Staged: return "staged";
  }
  return "?";
}

std::string_view to_string(PatientPosition p) {
  return p == PatientPosition::Supine ? "supine" : "prone";
}

void PlanParameters::validate() const {
  const auto bad = [](const char* key, const std::string& why) { return Error(ErrorCode::BadValue, std::string(key) + ": " + why); };
  if (target_lesion_id.empty() || target_lesion_id.find_first_of(", \n") != std::string::npos)
    throw bad("target_lesion_id", "must be a single non-empty id");
  const std::pair<const char*, double> numeric[] = {{"acoustic_power", acoustic_power},
                                                    {"sonication_duration", sonication_duration},
                                                    {"cooling_interval", cooling_interval},
                                                    {"predicted_total_energy", predicted_total_energy},
                                                    {"safety_margin", safety_margin}};
  for (const auto& [key, v] : numeric)
    if (!std::isfinite(v) || v < 0) throw bad(key, "must be finite and >= 0");
  if (treatment_order.empty()) throw bad("treatment_order", "is empty");
  std::set<std::string> seen;
  for (const auto& id : treatment_order) {
    if (id.empty() || id.find_first_of(", \n") != std::string::npos) throw bad("treatment_order", "malformed id");
    if (!seen.insert(id).second) throw bad("treatment_order", "lists " + id + " twice");
  }
  if (!seen.contains(target_lesion_id)) throw bad("treatment_order", "does not include the target lesion");
  for (const auto& w : intraoperative_warnings) {
    if (w.empty() || w == "none" || w.find(" | ") != std::string::npos || w.find('\n') != std::string::npos ||
        trim(w) != w)
      throw bad("intraoperative_warnings", "warning text '" + w + "' is not representable");
  }
}

FieldMap PlanParameters::fields() const {
  FieldMap m;
  m["target_lesion_id"] = target_lesion_id;
  m["ablation_strategy"] = std::string(to_string(ablation_strategy));
  m["acoustic_power"] = acoustic_power;
  m["sonication_duration"] = sonication_duration;
  m["cooling_interval"] = cooling_interval;
  m["predicted_total_energy"] = predicted_total_energy;
  m["treatment_order"] = join(treatment_order, ",");
  m["patient_position"] = std::string(to_string(patient_position));
  m["safety_margin"] = safety_margin;
  m["intraoperative_warnings"] = static_cast<double>(intraoperative_warnings.size());
  return m;
}

std::string render_plan(const TreatmentPlan& p) {
  p.plan.validate();
  std::ostringstream os;
  os << "REASONING:\n" << p.reasoning_trace << "\n\nPLAN:\n";
  for (auto key : kPlanKeys) os << key << ": " << field_text(p.plan, key) << '\n';
  return os.str();
}

TreatmentPlan parse_plan(std::string_view text) {
  const auto lines = lines_of(text);
  std::size_t reasoning = lines.size(), plan = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (reasoning == lines.size() && trim(lines[i]) == "REASONING:") reasoning = i;
    else if (reasoning != lines.size() && trim(lines[i]) == "PLAN:") {
      plan = i;
      break;
    }
  }
  if (reasoning == lines.size()) throw Error(ErrorCode::MissingBlock, "REASONING");
  if (plan == lines.size()) throw Error(ErrorCode::MissingBlock, "PLAN");

  TreatmentPlan out;
  std::size_t end = plan;
  if (end > reasoning + 1 && lines[end - 1].empty()) --end;  // separator line
  for (std::size_t i = reasoning + 1; i < end; ++i) {
    if (i > reasoning + 1) out.reasoning_trace += '\n';
    out.reasoning_trace += lines[i];
  }

  std::set<std::string, std::less<>> seen;
  for (std::size_t i = plan + 1; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw Error(ErrorCode::BadValue, "plan line '" + std::string(line) + "'");
    const auto key = trim(line.substr(0, colon));
    const auto value = trim(line.substr(colon + 1));
    if (!is_plan_key(key)) throw Error(ErrorCode::BadValue, "unknown plan key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second) throw Error(ErrorCode::BadValue, "duplicate key " + std::string(key));
    set_field(out.plan, key, value);
  }
  for (auto key : kPlanKeys)
    if (!seen.contains(key)) throw Error(ErrorCode::MissingKey, std::string(key));
  out.plan.validate();
  return out;
}

PlanParameters apply_patch(const PlanParameters& p, const std::map<std::string, std::string>& patch) {
  PlanParameters out = p;
  for (const auto& [key, value] : patch) {
    if (!is_plan_key(key)) throw Error(ErrorCode::UnknownPlanField, key);
    set_field(out, key, trim(value));
  }
  out.validate();
  return out;
}

}  // namespace fuas::strategy
