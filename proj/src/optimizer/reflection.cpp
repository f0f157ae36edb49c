#include "fuas/optimizer/reflection.hpp"

#include "fuas/core/error.hpp"

namespace fuas::optimizer {

std::string_view to_string(LoopStatus s) {
  switch (s) {
    case LoopStatus::Running: return "Running";
    case LoopStatus::Finalized: return "Finalized";
    case LoopStatus::Escalated: return "Escalated";
  }
  return "?";
}

std::string_view to_string(NextAction a) {
  switch (a) {
    case NextAction::Finalize: return "Finalize";
    case NextAction::TriggerPlanner: return "TriggerPlanner";
    case NextAction::Escalate: return "Escalate";
  }
  return "?";
}

ReflectDecision reflect_step(LoopState& state, const VerificationReport& report) {
  if (state.status != LoopStatus::Running)
    throw Error(ErrorCode::InvalidState, "loop is " + std::string(to_string(state.status)));
  if (state.t < 0 || state.t > state.t_max) throw Error(ErrorCode::InvalidState, "loop counter out of range");
  report.check_invariants();
  if (report.s_total() == 1) {
    state.status = LoopStatus::Finalized;
    return {NextAction::Finalize, ""};
  }
  if (state.t < state.t_max) {
    ++state.t;
    return {NextAction::TriggerPlanner, report.feedback_text};
  }
  state.status = LoopStatus::Escalated;
  return {NextAction::Escalate, report.feedback_text};
}

}  // namespace fuas::optimizer
