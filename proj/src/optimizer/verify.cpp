#include "fuas/optimizer/verify.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "fuas/core/error.hpp"
#include "fuas/core/schema.hpp"

namespace fuas::optimizer {

namespace {

std::string requires_suffix(const Predicate& p) { return " (requires " + p.to_string() + ")"; }

std::string joined(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
  return out.empty() ? "none" : out;
}

}  // namespace

TaskCheck check_task_feasibility(const strategy::PlanParameters& plan, const std::vector<PhysicalConstraint>& cs) {
  const FieldMap fields = plan.fields();
  TaskCheck out;
  for (const auto& c : cs) {
    if (!is_plan_key(c.predicate.field)) throw Error(ErrorCode::UnknownPlanField, c.predicate.field);
    out.checked.push_back(c.constraint_id);
    if (!c.predicate.holds_in(fields)) {
      out.s_task = 0;
      out.violations.push_back({c.constraint_id, c.message + requires_suffix(c.predicate)});
    }
  }
  return out;
}

FieldMap case_facts(const CaseInput& c, const strategy::Observations& obs) {
  FieldMap f;
  f["bmi"] = c.clinical_vars.bmi;
  f["abdominal_wall_thickness_mm"] = c.clinical_vars.abdominal_wall_thickness_mm;
  f["preop_score"] = c.clinical_vars.preop_score;
  f["age"] = c.clinical_vars.age;
  if (obs.seg) {
    f["multiplicity"] = static_cast<double>(obs.seg->multiplicity);
    f["lesion_volume_mm3"] = obs.seg->lesion_volume_mm3;
    if (auto d = obs.seg->min_oar_distance()) f["oar_min_distance_mm"] = *d;
  }
  if (obs.dose) {
    f["predicted_dose_J"] = obs.dose->predicted_dose_J;
    f["dose_band"] = std::string(dose::to_string(obs.dose->band));
  }
  return f;
}

std::string guideline_query(const strategy::PlanParameters& plan, const CaseInput& c) {
  std::ostringstream os;
  os << "ablation_strategy " << strategy::to_string(plan.ablation_strategy) << " safety_margin "
     << format_number(plan.safety_margin) << " mm acoustic_power " << format_number(plan.acoustic_power)
     << " W cooling_interval " << format_number(plan.cooling_interval) << " s patient_position "
     << strategy::to_string(plan.patient_position);
  if (!c.ehr_text.empty()) os << ' ' << c.ehr_text;
  return os.str();
}

GuideCheck check_guideline_consistency(const strategy::PlanParameters& plan, const FieldMap& facts,
                                       const std::string& query, const memory::VectorIndex* index, std::size_t k) {
  GuideCheck out;
  if (index == nullptr) {
    out.notes.push_back("no knowledge: memory disabled, guideline check skipped");
    return out;
  }
  if (index->size() == 0) {
    out.notes.push_back("no knowledge: index is empty, guideline check skipped");
    return out;
  }
  const auto result = index->retrieve(query, k, {memory::Kind::Guideline, memory::Kind::Contraindication});
  const FieldMap fields = plan.fields();
  std::set<std::string> seen;
  for (const auto& hit : result.hits) {
    out.retrieved_ids.push_back(hit.chunk.chunk_id);
    for (const auto& rule : hit.chunk.rules) {
      if (!seen.insert(rule.rule_id).second) continue;
      if (rule.applicability && !rule.applicability->holds_in(facts)) {
        out.not_applicable.push_back(rule.rule_id);
        continue;
      }
      out.checked_rules.push_back(rule.rule_id);
      if (!rule.requirement.holds_in(fields)) {
        out.s_guide = 0;
        out.violations.push_back({rule.rule_id, rule.message + requires_suffix(rule.requirement)});
      }
    }
  }
  if (out.retrieved_ids.empty()) out.notes.push_back("no knowledge: no guideline or contraindication chunks stored");
  return out;
}

void VerificationReport::check_invariants() const {
  if ((s_task != 0 && s_task != 1) || (s_guide != 0 && s_guide != 1))
    throw Error(ErrorCode::InvalidState, "scores must be 0 or 1");
  if ((s_total() == 0) != !violations.empty())
    throw Error(ErrorCode::InvalidState, "s_total must be 0 exactly when violations exist");
  if (feedback_text.empty() != violations.empty())
    throw Error(ErrorCode::InvalidState, "feedback must be present exactly when violations exist");
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  os << "s_task=" << s_task << " s_guide=" << s_guide << " s_total=" << s_total() << '\n'
     << "checked: " << joined(checked) << '\n'
     << "retrieved: " << joined(retrieved_chunk_ids) << '\n';
  for (const auto& n : notes) os << "note: " << n << '\n';
  if (!feedback_text.empty()) os << feedback_text << '\n';
  return os.str();
}

VerificationReport verify_plan(const strategy::PlanParameters& plan, const CaseInput& c,
                               const strategy::Observations& obs, const std::vector<PhysicalConstraint>& cs,
                               const memory::VectorIndex* index, std::size_t k) {
  VerificationReport r;
  auto task = check_task_feasibility(plan, cs);
  auto guide = check_guideline_consistency(plan, case_facts(c, obs), guideline_query(plan, c), index, k);
  r.s_task = task.s_task;
  r.s_guide = guide.s_guide;
  r.violations = std::move(task.violations);
  r.violations.insert(r.violations.end(), guide.violations.begin(), guide.violations.end());
  r.retrieved_chunk_ids = std::move(guide.retrieved_ids);
  r.checked = std::move(task.checked);
  r.checked.insert(r.checked.end(), guide.checked_rules.begin(), guide.checked_rules.end());
  r.notes = std::move(guide.notes);
  for (const auto& id : guide.not_applicable) r.notes.push_back("rule " + id + " not applicable");
  if (!r.violations.empty()) r.feedback_text = build_feedback(r.violations);
  r.check_invariants();
  return r;
}

std::string build_feedback(const std::vector<Violation>& violations) {
  if (violations.empty()) throw Error(ErrorCode::EmptyViolations, "no violations to report");
  std::vector<Violation> sorted = violations;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Violation& a, const Violation& b) { return a.id < b.id; });
  std::string out;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    out += (i ? "\n" : "") + ("Violation of " + sorted[i].id + ": " + sorted[i].message);
  return out;
}

}  // namespace fuas::optimizer
