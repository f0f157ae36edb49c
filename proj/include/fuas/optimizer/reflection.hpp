#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fuas/optimizer/verify.hpp"
#include "fuas/strategy/plan.hpp"

namespace fuas::optimizer {

enum class LoopStatus { Running, Finalized, Escalated };
enum class NextAction { Finalize, TriggerPlanner, Escalate };

std::string_view to_string(LoopStatus s);
std::string_view to_string(NextAction a);

struct LoopEntry {
  strategy::TreatmentPlan plan;
  VerificationReport report;
};

/// Generate-evaluate-refine bookkeeping. t counts regenerations, so at most
/// t_max + 1 plans are produced.
struct LoopState {
  int t = 0;
  int t_max = 2;
  std::vector<LoopEntry> history;
  LoopStatus status = LoopStatus::Running;
};

struct ReflectDecision {
  NextAction action = NextAction::Finalize;
  std::string feedback;  // set for TriggerPlanner and Escalate
};

/// Finalize when the report passes; otherwise trigger the planner while
/// t < t_max (incrementing t), else escalate. Throws InvalidState unless the
/// loop is Running.
ReflectDecision reflect_step(LoopState& state, const VerificationReport& report);

}  // namespace fuas::optimizer
