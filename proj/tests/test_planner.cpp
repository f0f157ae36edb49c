#include <doctest.h>

#include "fuas/planner/planner.hpp"

using namespace fuas;
using namespace fuas::planner;

namespace {

CaseInput sample_case() {
  CaseInput c;
  c.case_id = "p1";
  c.volume_ref = "p1/volume.rvol";
  return c;
}

}  // namespace

TEST_CASE("full configuration decomposes into four ordered steps") {
  const auto plan = decompose(sample_case(), {});
  REQUIRE(plan.steps.size() == 4);
  CHECK(plan.steps[0].tool == Tool::Segment);
  CHECK(plan.steps[1].tool == Tool::PredictDose);
  CHECK(plan.steps[2].tool == Tool::GeneratePlan);
  CHECK(plan.steps[3].tool == Tool::VerifyPlan);
  CHECK(plan.steps[0].agent == Agent::Executor);
  CHECK(plan.steps[3].agent == Agent::Optimizer);
  CHECK(plan.steps[3].depends_on == std::vector<std::size_t>{2});
  CHECK(validate(plan).empty());
}

TEST_CASE("ablation toggles drop steps") {
  PlannerConfig cfg;
  cfg.enable_executor = false;
  auto plan = decompose(sample_case(), cfg);
  CHECK(plan.steps.size() == 2);
  CHECK_FALSE(plan.contains(Tool::Segment));
  CHECK(validate(plan).empty());

  cfg = {};
  cfg.enable_optimizer = false;
  plan = decompose(sample_case(), cfg);
  CHECK(plan.steps.size() == 3);
  CHECK_FALSE(plan.contains(Tool::VerifyPlan));

  cfg = {};
  cfg.enable_memory = false;
  plan = decompose(sample_case(), cfg);
  CHECK(plan.steps[plan.find(Tool::GeneratePlan)].args.at("memory") == "off");
}

TEST_CASE("an existing mask replaces segmentation and feedback is forwarded") {
  auto c = sample_case();
  c.mask_ref = "p1/mask.rmsk";
  const auto plan = decompose(c, {}, "Violation of G4: margin");
  CHECK(plan.contains(Tool::LoadMask));
  CHECK_FALSE(plan.contains(Tool::Segment));
  CHECK(plan.steps[plan.find(Tool::GeneratePlan)].args.at("feedback") == "Violation of G4: margin");
  CHECK(to_trace(plan).find("feedback") == std::string::npos);
}

TEST_CASE("validation reports ordering and dependency faults") {
  auto plan = decompose(sample_case(), {});
  auto swapped = plan;
  std::swap(swapped.steps[0], swapped.steps[2]);
  CHECK_FALSE(validate(swapped).empty());

  auto cyclic = plan;
  cyclic.steps[0].depends_on = {3};
  CHECK_FALSE(validate(cyclic).empty());

  auto self = plan;
  self.steps[1].depends_on = {1};
  CHECK_FALSE(validate(self).empty());

  auto missing = plan;
  missing.steps[2].depends_on.clear();
  CHECK_FALSE(validate(missing).empty());
}
