#include <doctest.h>

#include <cmath>
#include <thread>

#include "fuas/core/error.hpp"
#include "fuas/strategy/provider.hpp"
#include "fuas/strategy/text_metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fuas;
using namespace fuas::strategy;

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

TreatmentPlan sample_plan() {
  TreatmentPlan t;
  t.reasoning_trace = "- first rule\n- second rule";
  t.plan.target_lesion_id = "L1";
  t.plan.ablation_strategy = AblationStrategy::Staged;
  t.plan.acoustic_power = 300;
  t.plan.sonication_duration = 66.7;
  t.plan.cooling_interval = 6;
  t.plan.predicted_total_energy = 20000;
  t.plan.treatment_order = {"L2", "L1"};
  t.plan.patient_position = PatientPosition::Prone;
  t.plan.safety_margin = 15;
  t.plan.intraoperative_warnings = {"L1 lies 8.00 mm from bowel, under 2x safety_margin"};
  return t;
}

seg::LesionDescriptor lesion(const std::string& id, std::optional<double> bowel_mm) {
  seg::LesionDescriptor l;
  l.id = id;
  l.volume_mm3 = 500;
  l.oar_distances = {{"bowel", bowel_mm}};
  return l;
}

Observations observations(std::vector<seg::LesionDescriptor> lesions, double dose_J = 18000,
                          dose::DoseBand band = dose::DoseBand::Medium) {
  seg::SegObservation s;
  s.multiplicity = lesions.size();
  s.lesions = std::move(lesions);
  s.lesion_volume_mm3 = 500.0 * static_cast<double>(s.multiplicity);
  std::optional<double> best;
  for (const auto& l : s.lesions)
    if (auto d = l.min_oar_distance(); d && (!best || *d < *best)) best = d;
  s.oar_min_distance = {{"bowel", best}};
  return {s, dose::DoseObservation{dose_J, band, "fuas-dose-1"}};
}

CaseInput sample_case() {
  CaseInput c;
  c.case_id = "s1";
  c.volume_ref = "s1/volume.rvol";
  c.ehr_text = "Symptomatic fibroid.";
  c.clinician_query = "Propose a plan.";
  return c;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

}  // namespace

TEST_CASE("plan text round-trips") {
  const auto t = sample_plan();
  const auto text = render_plan(t);
  CHECK(text.rfind("REASONING:\n", 0) == 0);
  CHECK(text.find("\n\nPLAN:\ntarget_lesion_id: L1\n") != std::string::npos);
  CHECK(parse_plan(text) == t);
  TreatmentPlan none = t;
  none.plan.intraoperative_warnings.clear();
  CHECK(render_plan(none).find("intraoperative_warnings: none") != std::string::npos);
  CHECK(parse_plan(render_plan(none)) == none);
}

TEST_CASE("plan parsing errors") {
  const auto text = render_plan(sample_plan());
  auto drop = text;
  const auto at = drop.find("cooling_interval:");
  drop.erase(at, drop.find('\n', at) - at + 1);
  try {
    parse_plan(drop);
    FAIL("expected MissingKey");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingKey);
    CHECK(e.detail().find("cooling_interval") != std::string::npos);
  }
  auto bad = text;
  bad.replace(bad.find("acoustic_power: 300"), 19, "acoustic_power: loud");
  CHECK(code_of([&] { parse_plan(bad); }) == ErrorCode::BadValue);
  CHECK(code_of([&] { parse_plan("PLAN:\ntarget_lesion_id: L1\n"); }) == ErrorCode::MissingBlock);
  CHECK(code_of([&] { parse_plan(text + "colour: red\n"); }) == ErrorCode::BadValue);
  auto neg = text;
  neg.replace(neg.find("safety_margin: 15"), 17, "safety_margin: -1");
  CHECK(code_of([&] { parse_plan(neg); }) == ErrorCode::BadValue);
}

TEST_CASE("plan patches") {
  const auto p = apply_patch(sample_plan().plan, {{"safety_margin", "20"}, {"patient_position", "supine"}});
  CHECK(p.safety_margin == 20);
  CHECK(p.patient_position == PatientPosition::Supine);
  CHECK(code_of([&] { apply_patch(p, {{"colour", "red"}}); }) == ErrorCode::UnknownPlanField);
  CHECK(code_of([&] { apply_patch(p, {{"acoustic_power", "x"}}); }) == ErrorCode::BadValue);
  const auto f = p.fields();
  CHECK(std::get<double>(f.at("safety_margin")) == 20);
  CHECK(std::get<std::string>(f.at("treatment_order")) == "L2,L1");
}

TEST_CASE("prompt sections render in fixed order") {
  const auto c = sample_case();
  const auto empty = assemble_prompt(c, {}, c.clinician_query, std::nullopt);
  const auto text = empty.render();
  const auto sys = text.find("SYSTEM:");
  const auto prof = text.find("PATIENT PROFILE:");
  const auto obs = text.find("OBSERVATIONS: none");
  const auto ret = text.find("RETRIEVED CASES: none");
  const auto query = text.find("QUERY:");
  CHECK(sys == 0);
  CHECK(sys < prof);
  CHECK(prof < obs);
  CHECK(obs < ret);
  CHECK(ret < query);
  CHECK(obs != std::string::npos);
  CHECK(text.find("FEEDBACK:") == std::string::npos);

  const auto full = assemble_prompt(c, observations({lesion("L1", 30.0)}), c.clinician_query, std::nullopt,
                                    "Violation of G4: margin (requires safety_margin >= 15)");
  const auto ft = full.render();
  CHECK(ft.find("SEG:") != std::string::npos);
  CHECK(ft.find("DOSE:") != std::string::npos);
  CHECK(ft.find("FEEDBACK:\nViolation of G4") > ft.find("QUERY:"));
}

TEST_CASE("retrieved context keeps case entries only") {
  memory::RetrievalResult r;
  r.query = "q";
  memory::KnowledgeChunk g{"guide#0000", "guideline text", "guide", memory::Kind::Guideline, {}, {}};
  memory::KnowledgeChunk k{"case#0000", "case text", "case", memory::Kind::Case, {}, {}};
  r.hits = {{g, 0.9}, {k, 0.5}};
  const auto b = assemble_prompt(sample_case(), {}, "q", r);
  REQUIRE(b.retrieved_cases.size() == 1);
  CHECK(b.render().find("[1] case#0000") != std::string::npos);
}

TEST_CASE("reference provider rule table") {
  const ReferencePlanProvider ref;
  const auto c = sample_case();
  {
    const auto t = ref.plan_for(assemble_prompt(c, observations({lesion("L1", 40.0)}), "q", std::nullopt));
    CHECK(t.plan.ablation_strategy == AblationStrategy::CenterToPeriphery);
    CHECK(t.plan.intraoperative_warnings.empty());
    CHECK(t.plan.safety_margin == 10);
    CHECK(t.plan.predicted_total_energy == 18000);
    CHECK(t.plan.sonication_duration == 60);
  }
  {
    const auto t = ref.plan_for(assemble_prompt(c, observations({lesion("L1", 8.0)}), "q", std::nullopt));
    REQUIRE(t.plan.intraoperative_warnings.size() == 1);
    CHECK(t.plan.intraoperative_warnings[0] == "L1 lies 8.00 mm from bowel, under 2x safety_margin");
  }
  {
    const auto t = ref.plan_for(
        assemble_prompt(c, observations({lesion("L1", 12.0), lesion("L2", 35.0)}), "q", std::nullopt));
    CHECK(t.plan.ablation_strategy == AblationStrategy::Staged);
    CHECK(t.plan.treatment_order == std::vector<std::string>{"L2", "L1"});
    CHECK(t.plan.target_lesion_id == "L1");
  }
  {
    const auto t = ref.plan_for(assemble_prompt(
        c, observations({lesion("L1", 40.0)}, 40000, dose::DoseBand::High), "q", std::nullopt));
    CHECK(t.plan.ablation_strategy == AblationStrategy::PeripheryToCenter);
  }
  {
    const auto t = ref.plan_for(assemble_prompt(c, {}, "q", std::nullopt));
    CHECK(t.plan.predicted_total_energy == 20000);
    CHECK(t.plan.safety_margin >= 10);
  }
  {
    const auto t = ref.plan_for(assemble_prompt(c, observations({lesion("L1", 12.0)}), "q", std::nullopt,
                                                "Violation of G4: x (requires safety_margin >= 15)\n"
                                                "Violation of C1: y (requires acoustic_power <= 280)\n"
                                                "Violation of G5: z (requires cooling_interval >= 8)"));
    CHECK(t.plan.safety_margin == 15);
    CHECK(t.plan.acoustic_power == 280);
    CHECK(t.plan.cooling_interval == 8);
  }
  const auto b = assemble_prompt(c, observations({lesion("L1", 12.0)}), "q", std::nullopt);
  CHECK(ref.complete(b) == ref.complete(b));
  CHECK(parse_plan(ref.complete(b)) == ref.plan_for(b));
}

TEST_CASE("generation contract") {
  const auto b = assemble_prompt(sample_case(), {}, "q", std::nullopt);
  const auto g = generate(b, ReferencePlanProvider());
  CHECK(g.prompt_text == b.render());
  CHECK(g.prompt_tokens == count_tokens(g.prompt_text));
  CHECK(g.output_tokens == count_tokens(g.output_text));
  CHECK(code_of([&] { generate(b, test::CannedProvider("no plan here")); }) == ErrorCode::ProviderFailure);
  TokenBudget tiny{5, 4096};
  CHECK(code_of([&] { generate(b, ReferencePlanProvider(), tiny); }) == ErrorCode::TokenBudgetExceeded);
  CHECK(count_tokens("  a b\tc\n") == 3);

  const test::CannedProvider serial(render_plan(sample_plan()), false);
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int i = 0; i < 4; ++i)
    threads.emplace_back([&] {
      if (parse_plan(generate(b, serial).output_text) == sample_plan()) ++ok;
    });
  for (auto& t : threads) t.join();
  CHECK(ok == 4);
}

TEST_CASE("rouge") {
  const auto same = rouge("a b c d", "a b c d");
  CHECK(same.r1 == 1);
  CHECK(same.r2 == 1);
  CHECK(same.rl == 1);
  CHECK(rouge("a b c", "a c").rl == doctest::Approx(0.8));
  const auto d = rouge("a b", "c d");
  CHECK(d.r1 == 0);
  CHECK(d.rl == 0);
  CHECK(rouge("", "").r1 == 1);
  CHECK(rouge("", "a").r1 == 0);
  CHECK(rouge("b a c", "a b c").r1 == rouge("a b c", "b a c").r1);

  const std::string ref = "the margin stays at ten mm around the bowel wall";
  const std::string hyp = "margin at ten mm around bowel";
  const double l = static_cast<double>(oracle::lcs(split(ref), split(hyp)));
  const double p = l / static_cast<double>(split(hyp).size()), r = l / static_cast<double>(split(ref).size());
  CHECK(rouge(ref, hyp).rl == doctest::Approx(2 * p * r / (p + r)).epsilon(1e-12));
}

TEST_CASE("bleu") {
  const auto same = bleu("a b c d e", "a b c d e");
  for (double v : same.b) CHECK(v == doctest::Approx(1.0));
  const auto hand = bleu("a c", "a b");
  CHECK(hand.b[0] == doctest::Approx(0.5));
  CHECK(hand.brevity_penalty == 1);
  const auto half = bleu("a b c d", "a b");
  CHECK(half.brevity_penalty == doctest::Approx(std::exp(-1.0)));
  CHECK(half.b[0] == doctest::Approx(std::exp(-1.0)));
  for (double v : bleu("x y z w", "x q z").b) {
    CHECK(v >= 0);
    CHECK(v <= 1);
  }
}
