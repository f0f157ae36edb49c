#include <doctest.h>

#include <algorithm>

#include "fuas/core/error.hpp"
#include "fuas/optimizer/reflection.hpp"
#include "support.hpp"

using namespace fuas;
using namespace fuas::optimizer;

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

strategy::PlanParameters safe_plan() {
  strategy::PlanParameters p;
  p.acoustic_power = 300;
  p.sonication_duration = 60;
  p.cooling_interval = 6;
  p.predicted_total_energy = 18000;
  p.safety_margin = 10;
  return p;
}

FieldMap facts(double bmi, std::optional<double> oar_mm, double dose_J) {
  FieldMap f{{"bmi", bmi}, {"abdominal_wall_thickness_mm", 20.0}, {"preop_score", 0.0}, {"age", 40.0},
             {"predicted_dose_J", dose_J}};
  if (oar_mm) f["oar_min_distance_mm"] = *oar_mm;
  return f;
}

bool has(const std::vector<std::string>& v, const std::string& x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

TEST_CASE("physical constraints") {
  const auto cs = default_constraints();
  REQUIRE(cs.size() == 4);
  CHECK(check_task_feasibility(safe_plan(), cs).s_task == 1);
  auto hot = safe_plan();
  hot.acoustic_power = 450;
  hot.cooling_interval = 4;
  const auto t = check_task_feasibility(hot, cs);
  CHECK(t.s_task == 0);
  REQUIRE(t.violations.size() == 2);
  CHECK(t.violations[0].id == "P1");
  CHECK(t.violations[0].message.find("(requires acoustic_power <= 400)") != std::string::npos);
  CHECK(t.violations[1].id == "P4");
  CHECK(t.checked.size() == 4);

  CHECK(parse_constraints(serialize_constraints(cs)) == cs);
  CHECK(code_of([] {
          parse_constraints(R"([{"id":"X","field":"wavelength","comparator":"<=","bound":3,"message":"m"}])");
        }) == ErrorCode::UnknownPlanField);
  CHECK(code_of([] { parse_constraints("{}"); }) == ErrorCode::ConfigError);
}

TEST_CASE("guideline rules fire on matching case facts") {
  const auto index = test::knowledge_index();
  const auto p = safe_plan();
  const auto far = check_guideline_consistency(p, facts(24, 40.0, 18000), "margin bowel", index.get());
  CHECK(far.s_guide == 1);
  CHECK(has(far.checked_rules, "G1"));
  CHECK(has(far.not_applicable, "G4"));
  CHECK(has(far.not_applicable, "C1"));

  const auto near = check_guideline_consistency(p, facts(24, 12.0, 18000), "margin bowel", index.get());
  CHECK(near.s_guide == 0);
  REQUIRE(near.violations.size() == 1);
  CHECK(near.violations[0].id == "G4");
  CHECK(near.violations[0].message.find("(requires safety_margin >= 15)") != std::string::npos);

  const auto heavy = check_guideline_consistency(p, facts(33, 40.0, 32000), "margin bowel", index.get());
  std::vector<std::string> ids;
  for (const auto& v : heavy.violations) ids.push_back(v.id);
  std::sort(ids.begin(), ids.end());
  CHECK(ids == std::vector<std::string>{"C1", "G5"});

  const auto missing = check_guideline_consistency(p, facts(24, std::nullopt, 18000), "q", index.get());
  CHECK(has(missing.not_applicable, "G4"));
  CHECK(missing.s_guide == 1);

  for (const auto& id : near.retrieved_ids) CHECK(id.find("case") == std::string::npos);
}

TEST_CASE("missing knowledge passes trivially with a note") {
  const auto off = check_guideline_consistency(safe_plan(), facts(40, 2.0, 50000), "q", nullptr);
  CHECK(off.s_guide == 1);
  REQUIRE(off.notes.size() == 1);
  CHECK(off.notes[0].find("no knowledge") != std::string::npos);
  memory::VectorIndex empty(std::make_shared<memory::HashingEmbedder>());
  const auto e = check_guideline_consistency(safe_plan(), facts(40, 2.0, 50000), "q", &empty);
  CHECK(e.s_guide == 1);
  CHECK(e.notes[0].find("no knowledge") != std::string::npos);
}

TEST_CASE("verification report and feedback") {
  CaseInput c;
  c.case_id = "v";
  c.volume_ref = "v.rvol";
  c.clinical_vars.bmi = 33;
  auto hot = safe_plan();
  hot.acoustic_power = 420;
  const auto r = verify_plan(hot, c, {}, default_constraints(), test::knowledge_index().get());
  CHECK(r.s_task == 0);
  CHECK(r.s_guide == 0);
  CHECK(r.s_total() == 0);
  CHECK(r.feedback_text.rfind("Violation of C1: ", 0) == 0);
  CHECK(r.feedback_text.find("\nViolation of P1: ") != std::string::npos);
  r.check_invariants();
  auto broken = r;
  broken.feedback_text.clear();
  CHECK(code_of([&] { broken.check_invariants(); }) == ErrorCode::InvalidState);

  CHECK(build_feedback({{"P3", "b"}, {"G1", "a"}}) == "Violation of G1: a\nViolation of P3: b");
  CHECK(code_of([] { build_feedback({}); }) == ErrorCode::EmptyViolations);

  c.clinical_vars.bmi = 22;
  const auto ok = verify_plan(safe_plan(), c, {}, default_constraints(), test::knowledge_index().get());
  CHECK(ok.s_total() == 1);
  CHECK(ok.feedback_text.empty());
  CHECK(guideline_query(safe_plan(), c).find("center_to_periphery") != std::string::npos);
}

TEST_CASE("reflection loop bound") {
  VerificationReport fail;
  fail.s_task = 0;
  fail.violations = {{"P1", "too hot"}};
  fail.feedback_text = build_feedback(fail.violations);
  VerificationReport pass;

  LoopState s;
  CHECK(reflect_step(s, fail).action == NextAction::TriggerPlanner);
  CHECK(s.t == 1);
  CHECK(reflect_step(s, fail).action == NextAction::TriggerPlanner);
  CHECK(s.t == 2);
  const auto last = reflect_step(s, fail);
  CHECK(last.action == NextAction::Escalate);
  CHECK(last.feedback == fail.feedback_text);
  CHECK(s.status == LoopStatus::Escalated);
  CHECK(code_of([&] { reflect_step(s, pass); }) == ErrorCode::InvalidState);

  LoopState ok;
  CHECK(reflect_step(ok, fail).feedback == fail.feedback_text);
  CHECK(reflect_step(ok, pass).action == NextAction::Finalize);
  CHECK(ok.status == LoopStatus::Finalized);
  CHECK(ok.t == 1);
}
