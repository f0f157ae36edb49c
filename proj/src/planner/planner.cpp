#include "fuas/planner/planner.hpp"

#include <sstream>

namespace fuas::planner {

std::string_view to_string(Agent a) {
  switch (a) {
    case Agent::Executor: return "Executor";
    case Agent::Strategy: return "Strategy";
    case Agent::Optimizer: return "Optimizer";
  }
  return "?";
}

std::string_view to_string(Tool t) {
  switch (t) {
    case Tool::Segment: return "Segment";
    case Tool::LoadMask: return "LoadMask";
    case Tool::PredictDose: return "PredictDose";
    case Tool::GeneratePlan: return "GeneratePlan";
    case Tool::VerifyPlan: return "VerifyPlan";
  }
  return "?";
}

std::size_t ActionPlan::find(Tool tool) const {
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (steps[i].tool == tool) return i;
  return steps.size();
}

ActionPlan decompose(const CaseInput& c, const PlannerConfig& cfg, std::string_view feedback) {
  ActionPlan plan;
  auto push = [&](Agent agent, Tool tool, std::map<std::string, std::string> args) {
    ActionStep s{agent, tool, std::move(args), {}};
    if (!plan.steps.empty()) s.depends_on.push_back(plan.steps.size() - 1);
    plan.steps.push_back(std::move(s));
  };

  if (cfg.enable_executor) {
    if (c.mask_ref)
      push(Agent::Executor, Tool::LoadMask, {{"mask_ref", *c.mask_ref}});
    else
      push(Agent::Executor, Tool::Segment, {{"volume_ref", c.volume_ref}, {"prompt", "auto"}});
    push(Agent::Executor, Tool::PredictDose, {{"volume_ref", c.volume_ref}});
  }
  std::map<std::string, std::string> gen_args{{"case_id", c.case_id},
                                              {"memory", cfg.enable_memory ? "on" : "off"},
                                              {"policy", cfg.system_policy_id}};
  if (!feedback.empty()) gen_args["feedback"] = std::string(feedback);
  push(Agent::Strategy, Tool::GeneratePlan, std::move(gen_args));
  if (cfg.enable_optimizer)
    push(Agent::Optimizer, Tool::VerifyPlan, {{"memory", cfg.enable_memory ? "on" : "off"}});
  return plan;
}

std::vector<std::string> validate(const ActionPlan& plan) {
  std::vector<std::string> out;
  const auto n = plan.steps.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d : plan.steps[i].depends_on) {
      if (d == i)
        out.push_back("cycle: step " + std::to_string(i) + " depends on itself");
      else if (d >= n)
        out.push_back("dependency: step " + std::to_string(i) + " references missing step " + std::to_string(d));
      else if (d > i)
        out.push_back("cycle: step " + std::to_string(i) + " depends on later step " + std::to_string(d));
    }
  }

  // Phase order: perception < quantification < reasoning < verification.
  auto phase = [](Tool t) {
    switch (t) {
      case Tool::Segment:
      case Tool::LoadMask: return 0;
      case Tool::PredictDose: return 1;
      case Tool::GeneratePlan: return 2;
      case Tool::VerifyPlan: return 3;
    }
    return 4;
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (phase(plan.steps[j].tool) < phase(plan.steps[i].tool)) {
        out.push_back("ordering: " + std::string(to_string(plan.steps[j].tool)) + " (step " + std::to_string(j) +
                      ") after " + std::string(to_string(plan.steps[i].tool)) + " (step " + std::to_string(i) + ")");
      }
    }
  }

  // Each later phase must (transitively) depend on the preceding present phase.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (phase(plan.steps[i].tool) >= phase(plan.steps[j].tool)) continue;
      std::vector<bool> seen(n, false);
      std::vector<std::size_t> stack{j};
      bool reaches = false;
      while (!stack.empty() && !reaches) {
        const auto k = stack.back();
        stack.pop_back();
        for (std::size_t d : plan.steps[k].depends_on) {
          if (d >= k || seen[d]) continue;
          seen[d] = true;
          reaches = reaches || d == i;
          stack.push_back(d);
        }
      }
      if (!reaches)
        out.push_back("dependency: " + std::string(to_string(plan.steps[j].tool)) + " (step " + std::to_string(j) +
                      ") does not depend on " + std::string(to_string(plan.steps[i].tool)) + " (step " +
                      std::to_string(i) + ")");
    }
  }
  return out;
}

std::string to_trace(const ActionPlan& plan) {
  std::ostringstream os;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& s = plan.steps[i];
    os << "step " << i << " agent=" << to_string(s.agent) << " tool=" << to_string(s.tool) << " depends_on=[";
    for (std::size_t k = 0; k < s.depends_on.size(); ++k) os << (k ? "," : "") << s.depends_on[k];
    os << "] args={";
    bool first = true;
    for (const auto& [key, value] : s.args) {
      if (key == "feedback") continue;  // multi-line; logged separately by the workflow
      os << (first ? "" : ",") << key << '=' << value;
      first = false;
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace fuas::planner
