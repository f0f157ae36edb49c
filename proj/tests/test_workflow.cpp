#include <doctest.h>

#include <algorithm>

#include "fuas/core/error.hpp"
#include "fuas/service/workflow.hpp"
#include "support.hpp"

using namespace fuas;
using namespace fuas::service;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

struct Suite {
  test::TempDir dir{"workflow"};
  std::vector<CaseInput> cases;
  Suite() {
    for (std::size_t i = 0; i < 20; ++i) cases.push_back(test::write_suite_case(dir.path(), i));
  }
};

Suite& suite() {
  static Suite s;
  return s;
}

bool first_report_cites(const WorkflowRecord& r, const std::string& id) {
  if (r.attempts.empty() || !r.attempts[0].report) return false;
  const auto& v = r.attempts[0].report->violations;
  return std::any_of(v.begin(), v.end(), [&](const auto& x) { return x.id == id; });
}

}  // namespace

TEST_CASE("full configuration finalizes with four steps per round") {
  auto& s = suite();
  const auto cfg = test::full_config(s.dir.path());
  const auto rec = run_workflow(s.cases[0], cfg);
  CHECK(rec.status == RecordStatus::Finalized);
  CHECK(rec.action_plan.steps.size() == 4);
  CHECK(rec.error.empty());
  REQUIRE(rec.terminal_plan() != nullptr);
  CHECK(rec.terminal_plan()->plan.safety_margin >= 10);
  CHECK(rec.observations.seg.has_value());
  CHECK(rec.observations.dose.has_value());
  CHECK(rec.attempts.back().report->s_total() == 1);
  CHECK(rec.generated_plans() == static_cast<std::size_t>(rec.t + 1));

  const auto agg = aggregate(rec.telemetry);
  REQUIRE(agg.size() == 3);
  CHECK(agg[0].agent == planner::Agent::Executor);
  CHECK(agg[0].token_usage == 0);
  CHECK(agg[1].token_usage > 0);
  CHECK(agg[2].token_usage > 0);
  CHECK(agg[0].success_rate() == 1.0);
  for (const auto& a : agg) CHECK(a.running_time_s >= 0);

  const auto& first = rec.attempts.front();
  CHECK(first.prompt_text.find("SYSTEM:") == 0);
  CHECK(first.prompt_text.find("RETRIEVED CASES: none") == std::string::npos);

  const auto j = record_to_json(rec);
  CHECK(j["status"] == "Finalized");
  CHECK(record_summary_json(rec)["case_id"] == s.cases[0].case_id);
}

TEST_CASE("guideline feedback repairs a bowel-adjacent plan in one retry") {
  auto& s = suite();
  const auto cfg = test::full_config(s.dir.path());
  bool seen = false;
  for (const auto& c : s.cases) {
    const auto rec = run_workflow(c, cfg);
    CHECK(rec.status == RecordStatus::Finalized);
    if (!first_report_cites(rec, "G4")) continue;
    seen = true;
    CHECK(rec.t == 1);
    CHECK(rec.attempts[1].feedback_in.find("Violation of G4") != std::string::npos);
    CHECK(rec.terminal_plan()->plan.safety_margin >= 15);
    break;
  }
  CHECK(seen);
}

TEST_CASE("an always-violating provider escalates after three plans") {
  auto& s = suite();
  auto cfg = test::full_config(s.dir.path());
  cfg.provider = std::make_shared<test::OverpoweredProvider>();
  auto rec = run_workflow(s.cases[1], cfg);
  CHECK(rec.status == RecordStatus::Escalated);
  CHECK(rec.generated_plans() == 3);
  CHECK(rec.t == 2);
  CHECK(rec.error.empty());

  SUBCASE("modify with a compliant patch finalizes") {
    review_decision(rec, Decision::Modify,
                    {{"acoustic_power", "250"}, {"safety_margin", "15"}, {"cooling_interval", "8"}}, cfg);
    CHECK(rec.status == RecordStatus::Finalized);
    CHECK(rec.attempts.back().origin == "modify");
    CHECK(rec.terminal_plan()->plan.acoustic_power == 250);
    CHECK(code_of([&] { review_decision(rec, Decision::Modify, {{"acoustic_power", "200"}}, cfg); }) ==
          ErrorCode::InvalidTransition);
    review_decision(rec, Decision::Approve, {}, cfg);
    CHECK(rec.status == RecordStatus::Approved);
  }
  SUBCASE("a failing modify regenerates under a fresh counter") {
    review_decision(rec, Decision::Modify, {{"safety_margin", "20"}}, cfg);
    CHECK(rec.status == RecordStatus::Escalated);
    CHECK(rec.attempts.size() == 6);
    CHECK(rec.attempts[3].origin == "modify");
  }
  SUBCASE("reject is terminal") {
    review_decision(rec, Decision::Reject, {}, cfg);
    CHECK(rec.status == RecordStatus::Rejected);
    CHECK(code_of([&] { review_decision(rec, Decision::Reject, {}, cfg); }) == ErrorCode::InvalidTransition);
  }
  SUBCASE("unknown patch fields are rejected") {
    CHECK(code_of([&] { review_decision(rec, Decision::Modify, {{"colour", "red"}}, cfg); }) ==
          ErrorCode::UnknownPlanField);
    CHECK(rec.status == RecordStatus::Escalated);
  }
}

TEST_CASE("ablation configurations") {
  auto& s = suite();
  const auto full = test::full_config(s.dir.path());

  auto no_exec = full;
  no_exec.planner.enable_executor = false;
  const auto a = run_workflow(s.cases[2], no_exec);
  CHECK(a.action_plan.steps.size() == 2);
  CHECK(a.observations.empty());
  CHECK(a.attempts.front().prompt_text.find("OBSERVATIONS: none") != std::string::npos);

  auto no_opt = full;
  no_opt.planner.enable_optimizer = false;
  const auto b = run_workflow(s.cases[2], no_opt);
  CHECK(b.status == RecordStatus::Finalized);
  CHECK(b.attempts.size() == 1);
  CHECK_FALSE(b.attempts[0].report.has_value());

  auto no_mem = full;
  no_mem.planner.enable_memory = false;
  no_mem.index = nullptr;
  const auto c = run_workflow(s.cases[2], no_mem);
  CHECK(c.attempts.front().prompt_text.find("RETRIEVED CASES: none") != std::string::npos);
  for (const auto& at : c.attempts) {
    REQUIRE(at.report.has_value());
    CHECK(at.report->s_guide == 1);
    CHECK(std::any_of(at.report->notes.begin(), at.report->notes.end(),
                      [](const auto& n) { return n.find("no knowledge") != std::string::npos; }));
  }

  auto missing_index = full;
  missing_index.index = nullptr;
  CHECK(code_of([&] { run_workflow(s.cases[2], missing_index); }) == ErrorCode::ConfigError);
  auto missing_model = full;
  missing_model.dose_model = nullptr;
  CHECK(code_of([&] { run_workflow(s.cases[2], missing_model); }) == ErrorCode::ConfigError);
}

TEST_CASE("a failing step halts and escalates") {
  auto& s = suite();
  auto c = s.cases[3];
  c.volume_ref = "does/not/exist.rvol";
  const auto rec = run_workflow(c, test::full_config(s.dir.path()));
  CHECK(rec.status == RecordStatus::Escalated);
  CHECK_FALSE(rec.error.empty());
  CHECK(rec.attempts.empty());
  CHECK(std::any_of(rec.trace.begin(), rec.trace.end(), [](const auto& l) { return l.rfind("halted", 0) == 0; }));
  WorkflowRecord copy = rec;
  CHECK(code_of([&] { review_decision(copy, Decision::Modify, {{"safety_margin", "12"}}, test::full_config(s.dir.path())); }) ==
        ErrorCode::InvalidTransition);
}

TEST_CASE("runs are deterministic and progress is reported") {
  auto& s = suite();
  const auto cfg = test::full_config(s.dir.path());
  std::size_t calls = 0;
  const auto a = run_workflow(s.cases[4], cfg, [&](const WorkflowRecord&) { ++calls; });
  const auto b = run_workflow(s.cases[4], cfg);
  CHECK(calls > 0);
  CHECK(a.attempts.back().output_text == b.attempts.back().output_text);
  CHECK(verify_terminal(a, cfg).s_total() == 1);
  CHECK(parse_decision("approve") == Decision::Approve);
  CHECK(code_of([] { parse_decision("maybe"); }) == ErrorCode::InvalidValue);
}

TEST_CASE("an existing mask skips segmentation") {
  auto& s = suite();
  auto cfg = test::full_config(s.dir.path());
  test::TempDir art("artifacts");
  cfg.artifact_dir = art.path();
  const auto first = run_workflow(s.cases[5], cfg);
  REQUIRE(first.mask_ref.has_value());
  auto c = s.cases[5];
  c.mask_ref = *first.mask_ref;
  CHECK(std::filesystem::exists(*c.mask_ref));
  const auto second = run_workflow(c, cfg);
  CHECK(second.action_plan.contains(planner::Tool::LoadMask));
  CHECK(second.status == first.status);
  CHECK(second.observations.seg->lesion_volume_mm3 == first.observations.seg->lesion_volume_mm3);
}
