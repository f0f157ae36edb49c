#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuas/core/case.hpp"
#include "fuas/dosemodel/dose.hpp"
#include "fuas/memory/index.hpp"
#include "fuas/optimizer/constraints.hpp"
#include "fuas/optimizer/verify.hpp"
#include "fuas/planner/planner.hpp"
#include "fuas/segtool/segment.hpp"
#include "fuas/strategy/provider.hpp"

namespace fuas::service {

enum class RecordStatus { Running, Finalized, Escalated, Approved, Rejected };
std::string_view to_string(RecordStatus s);

struct WorkflowConfig {
  planner::PlannerConfig planner;
  std::shared_ptr<const strategy::PlanProvider> provider;       // reference generator when null
  std::shared_ptr<const seg::SegmentationBackend> segmenter;    // region growing with phantom settings when null
  std::shared_ptr<const dose::DoseModel> dose_model;            // required with the executor
  std::shared_ptr<const memory::VectorIndex> index;             // required with memory
  std::vector<optimizer::PhysicalConstraint> constraints = optimizer::default_constraints();
  int t_max = 2;
  std::size_t top_k = 3;
  strategy::TokenBudget budget;
  std::filesystem::path data_dir;      // base for relative volume/mask refs
  std::filesystem::path artifact_dir;  // segmentation masks are written here when set
};

struct StepTelemetry {
  std::size_t round = 0;
  std::size_t step = 0;
  planner::Agent agent = planner::Agent::Executor;
  planner::Tool tool = planner::Tool::Segment;
  double seconds = 0;
  std::size_t prompt_tokens = 0;
  std::size_t output_tokens = 0;
  bool success = false;
  std::string detail;
};

struct AgentTelemetry {
  planner::Agent agent = planner::Agent::Executor;
  double running_time_s = 0;
  std::size_t token_usage = 0;
  std::size_t steps = 0;
  std::size_t successes = 0;

  double success_rate() const { return steps == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(steps); }
};

/// One entry per agent, in Executor, Strategy, Optimizer order.
std::vector<AgentTelemetry> aggregate(const std::vector<StepTelemetry>& steps);

/// One generated or clinician-modified plan with its verification.
struct Attempt {
  std::string origin;  // "provider" or "modify"
  std::string feedback_in;
  std::string prompt_text;
  std::string output_text;
  std::optional<strategy::TreatmentPlan> plan;
  std::optional<optimizer::VerificationReport> report;
};

struct WorkflowRecord {
  CaseInput input;
  planner::PlannerConfig config;
  planner::ActionPlan action_plan;
  std::vector<std::string> action_plan_traces;
  std::optional<std::string> mask_ref;
  strategy::Observations observations;
  std::vector<Attempt> attempts;
  int t = 0;
  int t_max = 2;
  RecordStatus status = RecordStatus::Running;
  std::vector<StepTelemetry> telemetry;
  std::vector<std::string> trace;
  std::string error;
  std::string created_at;
  std::string updated_at;

  /// Plan of the latest attempt, if any.
  const strategy::TreatmentPlan* terminal_plan() const;
  /// Number of attempts that came from the provider.
  std::size_t generated_plans() const;
};

using ProgressFn = std::function<void(const WorkflowRecord&)>;

/// Executes the decomposed plan round by round until the optimizer finalizes
/// or escalates. A failing step halts the run: the record is escalated with
/// `error` set. Throws ConfigError for a missing model, index or policy.
WorkflowRecord run_workflow(const CaseInput& c, const WorkflowConfig& cfg, const ProgressFn& progress = {});

enum class Decision { Approve, Reject, Modify };
/// Throws InvalidValue.
Decision parse_decision(std::string_view s);

/// Approve/reject a Finalized or Escalated record; modify an Escalated one,
/// which re-verifies the patched plan and continues the refine loop with a
/// fresh counter. Throws InvalidTransition.
void review_decision(WorkflowRecord& rec, Decision d, const std::map<std::string, std::string>& patch,
                     const WorkflowConfig& cfg, const ProgressFn& progress = {});

/// Re-verifies the latest plan against `cfg` regardless of how it was produced.
optimizer::VerificationReport verify_terminal(const WorkflowRecord& rec, const WorkflowConfig& cfg);

/// Full JSON rendering (prompts, plans, reports, telemetry, trace).
nlohmann::ordered_json record_to_json(const WorkflowRecord& rec);
/// Compact JSON summary: case_id, status, updated_at, feedback lines.
nlohmann::ordered_json record_summary_json(const WorkflowRecord& rec);
nlohmann::ordered_json telemetry_to_json(const std::vector<AgentTelemetry>& agg);

/// Ingests documents into a fresh hashing-embedder index.
std::shared_ptr<memory::VectorIndex> build_index(const std::vector<memory::KnowledgeDocument>& docs);

}  // namespace fuas::service
