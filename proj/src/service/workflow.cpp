#include "fuas/service/workflow.hpp"

#include <chrono>
#include <ctime>
#include <sstream>

#include "fuas/core/error.hpp"
#include "fuas/core/volume_io.hpp"
#include "fuas/memory/embedding.hpp"
#include "fuas/optimizer/reflection.hpp"
#include "fuas/radiomics/features.hpp"
#include "fuas/segtool/descriptors.hpp"
#include "fuas/segtool/prompt.hpp"
#include "fuas/service/cohort.hpp"

namespace fuas::service {

using nlohmann::ordered_json;
using planner::Agent;
using planner::Tool;

namespace {

std::string now_iso() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::filesystem::path resolve(const WorkflowConfig& cfg, const std::string& ref) {
  const std::filesystem::path p(ref);
  return p.is_absolute() || cfg.data_dir.empty() ? p : cfg.data_dir / p;
}

void check_config(const WorkflowConfig& cfg) {
  if (cfg.t_max < 0) throw Error(ErrorCode::ConfigError, "t_max must be >= 0");
  if (cfg.top_k == 0) throw Error(ErrorCode::ConfigError, "top_k must be >= 1");
  if (cfg.planner.enable_executor && !cfg.dose_model)
    throw Error(ErrorCode::ConfigError, "executor enabled without a dose model");
  if (cfg.planner.enable_memory) {
    if (!cfg.index) throw Error(ErrorCode::ConfigError, "memory enabled without a knowledge index");
    if (!cfg.index->has_source(cfg.planner.system_policy_id))
      throw Error(ErrorCode::ConfigError, "policy '" + cfg.planner.system_policy_id + "' is not in the knowledge index");
  }
}

const strategy::PlanProvider& provider_of(const WorkflowConfig& cfg) {
  static const strategy::ReferencePlanProvider fallback;
  return cfg.provider ? *cfg.provider : fallback;
}

const seg::SegmentationBackend& segmenter_of(const WorkflowConfig& cfg) {
  static const seg::RegionGrowingBackend fallback(phantom_segmentation_options());
  return cfg.segmenter ? *cfg.segmenter : fallback;
}

std::string policy_text(const memory::VectorIndex& index, const std::string& source) {
  std::string out;
  for (const auto& c : index.chunks())
    if (c.source_doc == source) out += (out.empty() ? "" : "\n") + c.text;
  return out;
}

// Per-run working set; volumes and masks are loaded lazily and reused across rounds.
struct Context {
  std::optional<Volume> volume;
  std::optional<Mask> mask;
  std::vector<seg::NamedMask> oars;
};

const Volume& volume_of(Context& ctx, const WorkflowRecord& rec, const WorkflowConfig& cfg) {
  if (!ctx.volume) ctx.volume = read_volume(resolve(cfg, rec.input.volume_ref));
  return *ctx.volume;
}

const std::vector<seg::NamedMask>& oars_of(Context& ctx, const WorkflowRecord& rec, const WorkflowConfig& cfg) {
  if (ctx.oars.empty()) {
    for (const auto& ref : rec.input.oar_refs) {
      auto name = std::filesystem::path(ref).stem().string();
      if (name.rfind("oar_", 0) == 0) name = name.substr(4);
      ctx.oars.push_back({name, read_mask(resolve(cfg, ref))});
    }
  }
  return ctx.oars;
}

void set_observation(Context& ctx, WorkflowRecord& rec, const WorkflowConfig& cfg, Mask mask, std::string ref) {
  const Volume& v = volume_of(ctx, rec, cfg);
  require_same_dims(v.grid(), mask.grid(), "lesion mask");
  auto obs = seg::geometric_descriptors(mask, v, oars_of(ctx, rec, cfg));
  if (obs.multiplicity == 0) throw Error(ErrorCode::EmptyMask, "no lesion found");
  obs.mask_ref = ref;
  rec.mask_ref = ref;
  rec.observations.seg = std::move(obs);
  ctx.mask = std::move(mask);
}

// Runs one step; returns a short detail string. Token counts are written to `t`.
std::string execute(const planner::ActionStep& step, Context& ctx, WorkflowRecord& rec, const WorkflowConfig& cfg,
                    const std::string& feedback, StepTelemetry& t) {
  switch (step.tool) {
    case Tool::Segment: {
      if (ctx.mask) return "reused segmentation " + *rec.mask_ref;
      const Volume& v = volume_of(ctx, rec, cfg);
      const auto prompt = seg::parse_prompt(step.args.at("prompt"));
      Mask m = seg::segment(v, prompt, segmenter_of(cfg)).binarized();
      std::string ref = "memory:" + rec.input.case_id + "/segmentation";
      if (!cfg.artifact_dir.empty()) {
        std::filesystem::create_directories(cfg.artifact_dir);
        const auto path = cfg.artifact_dir / "segmentation.rmsk";
        write_mask(path, m);
        ref = path.string();
      }
      set_observation(ctx, rec, cfg, std::move(m), ref);
      return "segmented " + std::to_string(rec.observations.seg->multiplicity) + " lesion(s) with prompt " +
             step.args.at("prompt");
    }
    case Tool::LoadMask: {
      if (ctx.mask) return "reused mask " + *rec.mask_ref;
      const auto& ref = step.args.at("mask_ref");
      set_observation(ctx, rec, cfg, read_mask(resolve(cfg, ref)), ref);
      return "loaded mask " + ref;
    }
    case Tool::PredictDose: {
      if (rec.observations.dose) return "reused dose prediction";
      if (!ctx.mask) throw Error(ErrorCode::InvalidState, "dose prediction before a lesion mask");
      const auto features = radiomics::extract(volume_of(ctx, rec, cfg), *ctx.mask);
      rec.observations.dose = dose::predict_dose(*cfg.dose_model, features, rec.input.clinical_vars);
      return rec.observations.dose->to_text();
    }
    case Tool::GeneratePlan: {
      std::optional<memory::RetrievalResult> retrieved;
      std::string system(strategy::kDefaultSystemInstruction);
      if (cfg.planner.enable_memory) {
        system = policy_text(*cfg.index, cfg.planner.system_policy_id);
        retrieved = cfg.index->retrieve(rec.input.clinician_query + " " + rec.input.ehr_text, cfg.top_k,
                                        {memory::Kind::Case});
      }
      const auto bundle =
          strategy::assemble_prompt(rec.input, rec.observations, rec.input.clinician_query, retrieved, feedback, system);
      Attempt a;
      a.origin = "provider";
      a.feedback_in = feedback;
      a.prompt_text = bundle.render();
      rec.attempts.push_back(a);
      auto gen = strategy::generate(bundle, provider_of(cfg), cfg.budget);
      t.prompt_tokens = gen.prompt_tokens;
      t.output_tokens = gen.output_tokens;
      rec.attempts.back().output_text = gen.output_text;
      rec.attempts.back().plan = strategy::parse_plan(gen.output_text);
      return "plan " + std::to_string(rec.generated_plans()) + " from " + provider_of(cfg).id();
    }
    case Tool::VerifyPlan: {
      auto& a = rec.attempts.back();
      if (!a.plan) throw Error(ErrorCode::InvalidState, "no plan to verify");
      const memory::VectorIndex* index = cfg.planner.enable_memory ? cfg.index.get() : nullptr;
      a.report = optimizer::verify_plan(a.plan->plan, rec.input, rec.observations, cfg.constraints, index, cfg.top_k);
      t.prompt_tokens = strategy::count_tokens(optimizer::guideline_query(a.plan->plan, rec.input));
      t.output_tokens = strategy::count_tokens(a.report->to_text());
      return "s_total=" + std::to_string(a.report->s_total()) + " violations=" +
             std::to_string(a.report->violations.size());
    }
  }
  throw Error(ErrorCode::InvalidState, "unknown tool");
}

void halt(WorkflowRecord& rec, const std::string& why) {
  rec.status = RecordStatus::Escalated;
  rec.error = why;
  rec.trace.push_back("halted: " + why + "; escalated for manual review");
}

void touch(WorkflowRecord& rec, const ProgressFn& progress) {
  rec.updated_at = now_iso();
  if (progress) progress(rec);
}

// Generate-evaluate-refine rounds starting from the record's loop counter.
void drive(WorkflowRecord& rec, const WorkflowConfig& cfg, std::string feedback, const ProgressFn& progress) {
  Context ctx;
  optimizer::LoopState loop;
  loop.t = rec.t;
  loop.t_max = rec.t_max;
  while (true) {
    const std::size_t round = rec.action_plan_traces.size();
    rec.action_plan = planner::decompose(rec.input, cfg.planner, feedback);
    if (const auto issues = planner::validate(rec.action_plan); !issues.empty()) {
      halt(rec, "invalid action plan: " + issues.front());
      return touch(rec, progress);
    }
    rec.action_plan_traces.push_back(planner::to_trace(rec.action_plan));
    rec.trace.push_back("round " + std::to_string(round) + " t=" + std::to_string(loop.t));

    for (std::size_t i = 0; i < rec.action_plan.steps.size(); ++i) {
      const auto& step = rec.action_plan.steps[i];
      StepTelemetry t;
      t.round = round;
      t.step = i;
      t.agent = step.agent;
      t.tool = step.tool;
      const auto start = std::chrono::steady_clock::now();
      try {
        t.detail = execute(step, ctx, rec, cfg, feedback, t);
        t.success = true;
      } catch (const std::exception& e) {
        t.detail = e.what();
      }
      t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rec.telemetry.push_back(t);
      rec.trace.push_back("step " + std::to_string(i) + " " + std::string(planner::to_string(step.agent)) + "/" +
                          std::string(planner::to_string(step.tool)) + (t.success ? " ok: " : " FAILED: ") + t.detail);
      if (step.agent != Agent::Executor || !t.success) touch(rec, progress);
      if (!t.success) {
        halt(rec, std::string(planner::to_string(step.tool)) + " failed: " + t.detail);
        return touch(rec, progress);
      }
    }

    auto& last = rec.attempts.back();
    if (!cfg.planner.enable_optimizer) {
      rec.status = RecordStatus::Finalized;
      rec.trace.push_back("optimizer disabled: plan emitted unverified");
      return touch(rec, progress);
    }
    for (const auto& n : last.report->notes) rec.trace.push_back("note: " + n);
    const auto decision = optimizer::reflect_step(loop, *last.report);
    rec.t = loop.t;
    rec.trace.push_back("reflect: " + std::string(optimizer::to_string(decision.action)) + " t=" + std::to_string(loop.t));
    switch (decision.action) {
      case optimizer::NextAction::Finalize:
        rec.status = RecordStatus::Finalized;
        return touch(rec, progress);
      case optimizer::NextAction::Escalate:
        rec.status = RecordStatus::Escalated;
        return touch(rec, progress);
      case optimizer::NextAction::TriggerPlanner:
        feedback = decision.feedback;
        touch(rec, progress);
        break;
    }
  }
}

ordered_json report_json(const optimizer::VerificationReport& r) {
  ordered_json j;
  j["s_task"] = r.s_task;
  j["s_guide"] = r.s_guide;
  j["s_total"] = r.s_total();
  j["violations"] = ordered_json::array();
  for (const auto& v : r.violations) j["violations"].push_back({{"id", v.id}, {"message", v.message}});
  j["retrieved_chunk_ids"] = r.retrieved_chunk_ids;
  j["checked"] = r.checked;
  j["notes"] = r.notes;
  j["feedback"] = r.feedback_text;
  return j;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

}  // namespace

std::string_view to_string(RecordStatus s) {
  switch (s) {
    case RecordStatus::Running: return "Running";
    case RecordStatus::Finalized: return "Finalized";
    case RecordStatus::Escalated: return "Escalated";
    case RecordStatus::Approved: return "Approved";
    case RecordStatus::Rejected: return "Rejected";
  }
  return "?";
}

std::vector<AgentTelemetry> aggregate(const std::vector<StepTelemetry>& steps) {
  std::vector<AgentTelemetry> out{{Agent::Executor}, {Agent::Strategy}, {Agent::Optimizer}};
  for (const auto& s : steps) {
    auto& a = out[static_cast<std::size_t>(s.agent)];
    a.running_time_s += s.seconds;
    if (s.agent != Agent::Executor) a.token_usage += s.prompt_tokens + s.output_tokens;
    ++a.steps;
    if (s.success) ++a.successes;
  }
  return out;
}

const strategy::TreatmentPlan* WorkflowRecord::terminal_plan() const {
  for (auto it = attempts.rbegin(); it != attempts.rend(); ++it)
    if (it->plan) return &*it->plan;
  return nullptr;
}

std::size_t WorkflowRecord::generated_plans() const {
  std::size_t n = 0;
  for (const auto& a : attempts)
    if (a.origin == "provider" && a.plan) ++n;
  return n;
}

WorkflowRecord run_workflow(const CaseInput& c, const WorkflowConfig& cfg, const ProgressFn& progress) {
  check_config(cfg);
  if (c.case_id.empty()) throw Error(ErrorCode::MissingField, "case_id");
  c.clinical_vars.validate();
  WorkflowRecord rec;
  rec.input = c;
  rec.config = cfg.planner;
  rec.t_max = cfg.t_max;
  rec.created_at = now_iso();
  rec.trace.push_back("case " + c.case_id + " executor=" + (cfg.planner.enable_executor ? "on" : "off") +
                      " optimizer=" + (cfg.planner.enable_optimizer ? "on" : "off") +
                      " memory=" + (cfg.planner.enable_memory ? "on" : "off"));
  touch(rec, progress);
  drive(rec, cfg, "", progress);
  return rec;
}

Decision parse_decision(std::string_view s) {
  if (s == "approve") return Decision::Approve;
  if (s == "reject") return Decision::Reject;
  if (s == "modify") return Decision::Modify;
  throw Error(ErrorCode::InvalidValue, "decision must be approve, reject or modify");
}

void review_decision(WorkflowRecord& rec, Decision d, const std::map<std::string, std::string>& patch,
                     const WorkflowConfig& cfg, const ProgressFn& progress) {
  const auto from = std::string(to_string(rec.status));
  if (d != Decision::Modify) {
    if (rec.status != RecordStatus::Finalized && rec.status != RecordStatus::Escalated)
      throw Error(ErrorCode::InvalidTransition, "cannot review a " + from + " record");
    rec.status = d == Decision::Approve ? RecordStatus::Approved : RecordStatus::Rejected;
    rec.trace.push_back("review: " + from + " -> " + std::string(to_string(rec.status)));
    return touch(rec, progress);
  }
  if (rec.status != RecordStatus::Escalated)
    throw Error(ErrorCode::InvalidTransition, "only Escalated records can be modified, this one is " + from);
  const auto* current = rec.terminal_plan();
  if (current == nullptr) throw Error(ErrorCode::InvalidTransition, "escalated record has no plan to modify");
  if (patch.empty()) throw Error(ErrorCode::InvalidValue, "modify needs a non-empty patch");

  Attempt a;
  a.origin = "modify";
  a.plan = strategy::TreatmentPlan{current->reasoning_trace, strategy::apply_patch(current->plan, patch)};
  std::string changes;
  for (const auto& [k, v] : patch) changes += (changes.empty() ? "" : ", ") + k + "=" + v;
  a.plan->reasoning_trace += "\n- [H] clinician modification: " + changes;

  check_config(cfg);
  rec.status = RecordStatus::Running;
  rec.t = 0;
  rec.error.clear();
  rec.trace.push_back("review: modify (" + changes + "), Escalated -> Running");
  StepTelemetry t;
  t.round = rec.action_plan_traces.size();
  t.agent = Agent::Optimizer;
  t.tool = Tool::VerifyPlan;
  const auto start = std::chrono::steady_clock::now();
  const memory::VectorIndex* index = cfg.planner.enable_memory ? cfg.index.get() : nullptr;
  a.report = optimizer::verify_plan(a.plan->plan, rec.input, rec.observations, cfg.constraints, index, cfg.top_k);
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  t.prompt_tokens = strategy::count_tokens(optimizer::guideline_query(a.plan->plan, rec.input));
  t.output_tokens = strategy::count_tokens(a.report->to_text());
  t.success = true;
  t.detail = "re-verified modified plan: s_total=" + std::to_string(a.report->s_total());
  rec.telemetry.push_back(t);
  rec.attempts.push_back(a);

  optimizer::LoopState loop;
  loop.t_max = rec.t_max;
  const auto decision = optimizer::reflect_step(loop, *rec.attempts.back().report);
  rec.t = loop.t;
  rec.trace.push_back("reflect: " + std::string(optimizer::to_string(decision.action)) + " t=" + std::to_string(loop.t));
  switch (decision.action) {
    case optimizer::NextAction::Finalize:
      rec.status = RecordStatus::Finalized;
      return touch(rec, progress);
    case optimizer::NextAction::Escalate:
      rec.status = RecordStatus::Escalated;
      return touch(rec, progress);
    case optimizer::NextAction::TriggerPlanner:
      touch(rec, progress);
      return drive(rec, cfg, decision.feedback, progress);
  }
}

optimizer::VerificationReport verify_terminal(const WorkflowRecord& rec, const WorkflowConfig& cfg) {
  const auto* p = rec.terminal_plan();
  if (p == nullptr) throw Error(ErrorCode::InvalidState, "record has no plan");
  const memory::VectorIndex* index = cfg.planner.enable_memory ? cfg.index.get() : nullptr;
  return optimizer::verify_plan(p->plan, rec.input, rec.observations, cfg.constraints, index, cfg.top_k);
}

ordered_json record_to_json(const WorkflowRecord& rec) {
  ordered_json j;
  j["case_id"] = rec.input.case_id;
  j["status"] = std::string(to_string(rec.status));
  j["created_at"] = rec.created_at;
  j["updated_at"] = rec.updated_at;
  j["error"] = rec.error;
  j["config"] = {{"enable_executor", rec.config.enable_executor},
                 {"enable_optimizer", rec.config.enable_optimizer},
                 {"enable_memory", rec.config.enable_memory},
                 {"system_policy_id", rec.config.system_policy_id}};
  j["case"] = ordered_json::parse(serialize_case(rec.input));
  j["loop"] = {{"t", rec.t}, {"t_max", rec.t_max}};
  j["action_plans"] = rec.action_plan_traces;
  j["mask_ref"] = rec.mask_ref ? ordered_json(*rec.mask_ref) : ordered_json(nullptr);
  ordered_json obs;
  obs["seg"] = rec.observations.seg ? ordered_json(rec.observations.seg->to_text()) : ordered_json(nullptr);
  if (rec.observations.dose) {
    const auto& d = *rec.observations.dose;
    obs["dose"] = {{"predicted_dose_J", d.predicted_dose_J},
                   {"band", std::string(dose::to_string(d.band))},
                   {"model_version", d.model_version}};
  } else {
    obs["dose"] = nullptr;
  }
  j["observations"] = obs;
  j["attempts"] = ordered_json::array();
  for (const auto& a : rec.attempts) {
    ordered_json e;
    e["origin"] = a.origin;
    e["feedback_in"] = a.feedback_in;
    e["prompt"] = a.prompt_text;
    e["output"] = a.output_text;
    e["plan"] = a.plan ? ordered_json(strategy::render_plan(*a.plan)) : ordered_json(nullptr);
    e["report"] = a.report ? report_json(*a.report) : ordered_json(nullptr);
    j["attempts"].push_back(std::move(e));
  }
  j["feedback"] = record_summary_json(rec)["feedback"];
  j["telemetry"] = ordered_json::array();
  for (const auto& t : rec.telemetry) {
    j["telemetry"].push_back({{"round", t.round},
                              {"step", t.step},
                              {"agent", std::string(planner::to_string(t.agent))},
                              {"tool", std::string(planner::to_string(t.tool))},
                              {"seconds", t.seconds},
                              {"prompt_tokens", t.prompt_tokens},
                              {"output_tokens", t.output_tokens},
                              {"success", t.success},
                              {"detail", t.detail}});
  }
  j["telemetry_summary"] = telemetry_to_json(aggregate(rec.telemetry));
  j["trace"] = rec.trace;
  return j;
}

ordered_json record_summary_json(const WorkflowRecord& rec) {
  ordered_json j;
  j["case_id"] = rec.input.case_id;
  j["status"] = std::string(to_string(rec.status));
  j["updated_at"] = rec.updated_at;
  j["error"] = rec.error;
  j["plans"] = rec.attempts.size();
  std::vector<std::string> feedback;
  for (auto it = rec.attempts.rbegin(); it != rec.attempts.rend(); ++it) {
    if (it->report) {
      feedback = split_lines(it->report->feedback_text);
      break;
    }
  }
  j["feedback"] = feedback;
  return j;
}

ordered_json telemetry_to_json(const std::vector<AgentTelemetry>& agg) {
  ordered_json out = ordered_json::array();
  for (const auto& a : agg) {
    out.push_back({{"agent", std::string(planner::to_string(a.agent))},
                   {"running_time_s", a.running_time_s},
                   {"token_usage", a.token_usage},
                   {"steps", a.steps},
                   {"success_rate", a.success_rate()}});
  }
  return out;
}

std::shared_ptr<memory::VectorIndex> build_index(const std::vector<memory::KnowledgeDocument>& docs) {
  auto index = std::make_shared<memory::VectorIndex>(std::make_shared<memory::HashingEmbedder>());
  memory::ingest(*index, docs);
  return index;
}

}  // namespace fuas::service
