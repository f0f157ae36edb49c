#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fuas/core/case.hpp"

namespace fuas::planner {

enum class Agent { Executor, Strategy, Optimizer };
enum class Tool { Segment, LoadMask, PredictDose, GeneratePlan, VerifyPlan };

std::string_view to_string(Agent a);
std::string_view to_string(Tool t);

/// Ablation toggles and the meta-policy the plan is compiled under.
struct PlannerConfig {
  bool enable_executor = true;
  bool enable_optimizer = true;
  bool enable_memory = true;
  std::string system_policy_id = "fuas-workflow-policy";

  bool operator==(const PlannerConfig&) const = default;
};

/// One atomic action <Agent, Tool, Args>.
struct ActionStep {
  Agent agent = Agent::Strategy;
  Tool tool = Tool::GeneratePlan;
  std::map<std::string, std::string> args;
  std::vector<std::size_t> depends_on;

  bool operator==(const ActionStep&) const = default;
};

struct ActionPlan {
  std::vector<ActionStep> steps;

  /// Index of the first step using `tool`, or steps.size() when absent.
  std::size_t find(Tool tool) const;
  bool contains(Tool tool) const { return find(tool) != steps.size(); }
  bool operator==(const ActionPlan&) const = default;
};

/// Compiles the task queue: perception, quantification, then reasoning, with
/// verification appended when the optimizer is enabled. `feedback` is the
/// optimizer's report on a previous attempt and is forwarded to GeneratePlan.
ActionPlan decompose(const CaseInput& c, const PlannerConfig& cfg, std::string_view feedback = {});

/// Every ordering or dependency violation; empty means the plan is valid.
std::vector<std::string> validate(const ActionPlan& plan);

/// One line per step: "step <i> agent=<A> tool=<T> depends_on=[..] args={k=v,..}".
std::string to_trace(const ActionPlan& plan);

}  // namespace fuas::planner
