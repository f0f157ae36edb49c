#pragma once

#include <string>
#include <vector>

#include "fuas/core/case.hpp"
#include "fuas/memory/index.hpp"
#include "fuas/optimizer/constraints.hpp"
#include "fuas/strategy/plan.hpp"
#include "fuas/strategy/prompt.hpp"

namespace fuas::optimizer {

struct Violation {
  std::string id;  // constraint or rule id
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct TaskCheck {
  int s_task = 1;
  std::vector<Violation> violations;
  std::vector<std::string> checked;
};

/// Throws UnknownPlanField when a constraint names a field outside the plan.
TaskCheck check_task_feasibility(const strategy::PlanParameters& plan, const std::vector<PhysicalConstraint>& cs);

/// Case facts for rule applicability: clinical variables plus whatever the
/// observations provide (multiplicity, lesion_volume_mm3, oar_min_distance_mm,
/// predicted_dose_J, dose_band).
FieldMap case_facts(const CaseInput& c, const strategy::Observations& obs);

/// Retrieval query: the plan's strategy fields followed by the EHR text.
std::string guideline_query(const strategy::PlanParameters& plan, const CaseInput& c);

struct GuideCheck {
  int s_guide = 1;
  std::vector<Violation> violations;
  std::vector<std::string> retrieved_ids;
  std::vector<std::string> checked_rules;
  std::vector<std::string> not_applicable;
  std::vector<std::string> notes;
};

/// Top-k guideline/contraindication chunks for `query`; each attached rule
/// whose applicability holds on `facts` must have its requirement hold on the
/// plan. A null or empty index gives s_guide = 1 with a "no knowledge" note.
/// Rules that reference an absent fact are not applicable.
GuideCheck check_guideline_consistency(const strategy::PlanParameters& plan, const FieldMap& facts,
                                       const std::string& query, const memory::VectorIndex* index,
                                       std::size_t k = 3);

struct VerificationReport {
  int s_task = 1;
  int s_guide = 1;
  std::vector<Violation> violations;
  std::vector<std::string> retrieved_chunk_ids;
  std::vector<std::string> checked;
  std::vector<std::string> notes;
  std::string feedback_text;

  int s_total() const { return s_task * s_guide; }
  /// Throws InvalidState when the score, violation and feedback fields disagree.
  void check_invariants() const;
  std::string to_text() const;
};

VerificationReport verify_plan(const strategy::PlanParameters& plan, const CaseInput& c,
                               const strategy::Observations& obs, const std::vector<PhysicalConstraint>& cs,
                               const memory::VectorIndex* index, std::size_t k = 3);

/// "Violation of <id>: <message>" per line, sorted by id. Throws EmptyViolations.
std::string build_feedback(const std::vector<Violation>& violations);

}  // namespace fuas::optimizer
