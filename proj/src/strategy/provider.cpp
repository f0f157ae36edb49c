#include "fuas/strategy/provider.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <regex>
#include <sstream>

#include "fuas/core/error.hpp"
#include "fuas/core/predicate.hpp"
#include "fuas/core/stats.hpp"
#include "fuas/memory/chunker.hpp"

namespace fuas::strategy {

namespace {

std::mutex& serial_mutex() {
  static std::mutex m;
  return m;
}

bool has_contract_blocks(std::string_view text) {
  std::size_t pos = 0;
  bool reasoning = false;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line == "REASONING:") reasoning = true;
    else if (reasoning && line == "PLAN:") return true;
    pos = end + 1;
  }
  return false;
}

std::vector<Predicate> feedback_requirements(const std::string& feedback) {
  static const std::regex re(R"(\(requires ([^)]*)\))");
  std::vector<Predicate> out;
  for (auto it = std::sregex_iterator(feedback.begin(), feedback.end(), re); it != std::sregex_iterator(); ++it) {
    try {
      out.push_back(parse_predicate((*it)[1].str()));
    } catch (const Error&) {
    }
  }
  return out;
}

double distance_or_inf(const std::optional<double>& d) {
  return d ? *d : std::numeric_limits<double>::infinity();
}

}  // namespace

std::size_t count_tokens(std::string_view text) { return memory::tokenize(text).size(); }

Generation generate(const PromptBundle& bundle, const PlanProvider& provider, const TokenBudget& budget) {
  Generation g;
  g.prompt_text = bundle.render();
  g.prompt_tokens = count_tokens(g.prompt_text);
  if (g.prompt_tokens > budget.max_prompt_tokens)
    throw Error(ErrorCode::TokenBudgetExceeded, "prompt has " + std::to_string(g.prompt_tokens) + " tokens");
  try {
    std::unique_lock<std::mutex> lock(serial_mutex(), std::defer_lock);
    if (!provider.reentrant()) lock.lock();
    g.output_text = provider.complete(bundle);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ProviderFailure || e.code() == ErrorCode::TokenBudgetExceeded) throw;
    throw Error(ErrorCode::ProviderFailure, provider.id() + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ProviderFailure, provider.id() + ": " + e.what());
  }
  g.output_tokens = count_tokens(g.output_text);
  if (g.output_tokens > budget.max_output_tokens)
    throw Error(ErrorCode::TokenBudgetExceeded, "output has " + std::to_string(g.output_tokens) + " tokens");
  if (!has_contract_blocks(g.output_text))
    throw Error(ErrorCode::ProviderFailure, provider.id() + ": output lacks REASONING/PLAN blocks");
  return g;
}

ReferencePlanProvider::ReferencePlanProvider(ReferenceProviderConfig cfg) : cfg_(cfg) {
  if (!(cfg_.acoustic_power_W > 0) || !(cfg_.margin_floor_mm >= 0) || !(cfg_.cooling_interval_s >= 0) ||
      !(cfg_.nominal_energy_J >= 0) || !(cfg_.warning_factor > 0))
    throw Error(ErrorCode::ConfigError, "reference provider settings must be positive");
}

TreatmentPlan ReferencePlanProvider::plan_for(const PromptBundle& b) const {
  const auto& seg = b.observations.seg;
  const auto& dose = b.observations.dose;
  std::vector<std::string> why;
  PlanParameters p;

  const std::size_t multiplicity = seg ? seg->multiplicity : 1;
  const bool high = dose && dose->band == dose::DoseBand::High;
  if (!seg) why.push_back("- [R0] no segmentation observation, assuming a single lesion L1");
  if (multiplicity >= 2) {
    p.ablation_strategy = AblationStrategy::Staged;
    why.push_back("- [R1] multiplicity=" + std::to_string(multiplicity) + " >= 2 -> ablation_strategy=staged");
  } else if (high) {
    p.ablation_strategy = AblationStrategy::PeripheryToCenter;
    why.push_back("- [R2] dose band high -> ablation_strategy=periphery_to_center");
  } else {
    p.ablation_strategy = AblationStrategy::CenterToPeriphery;
    why.push_back("- [R3] single lesion, dose band not high -> ablation_strategy=center_to_periphery");
  }

  struct Entry {
    std::string id;
    std::optional<double> distance;
  };
  std::vector<Entry> lesions;
  if (seg)
    for (const auto& l : seg->lesions) lesions.push_back({l.id, l.min_oar_distance()});
  if (lesions.empty()) lesions.push_back({"L1", seg ? seg->min_oar_distance() : std::nullopt});
  std::stable_sort(lesions.begin(), lesions.end(), [](const Entry& a, const Entry& c) {
    const double da = distance_or_inf(a.distance), dc = distance_or_inf(c.distance);
    if (da != dc) return da > dc;
    return a.id < c.id;
  });
  p.treatment_order.clear();
  for (const auto& l : lesions) p.treatment_order.push_back(l.id);
  p.target_lesion_id = std::find_if(lesions.begin(), lesions.end(), [](const Entry& e) { return e.id == "L1"; }) !=
                               lesions.end()
                           ? "L1"
                           : lesions.front().id;
  {
    std::string order;
    for (const auto& id : p.treatment_order) order += (order.empty() ? "" : ",") + id;
    why.push_back("- [R4] order lesions by descending OAR distance -> treatment_order=" + order +
                  "; target_lesion_id=" + p.target_lesion_id);
  }

  double margin = std::max(10.0, cfg_.margin_floor_mm);
  why.push_back("- [R5] safety_margin=max(10, floor " + format_number(cfg_.margin_floor_mm) + ") = " +
                format_number(margin));
  double power = cfg_.acoustic_power_W;
  double cooling = cfg_.cooling_interval_s;
  PatientPosition position = cfg_.patient_position;

  for (const auto& req : feedback_requirements(b.feedback)) {
    const auto* num = std::get_if<double>(&req.bound);
    const auto* str = std::get_if<std::string>(&req.bound);
    const bool floor = req.cmp == Comparator::Ge || req.cmp == Comparator::Gt;
    const bool cap = req.cmp == Comparator::Le || req.cmp == Comparator::Lt;
    const std::string text = req.to_string();
    if (num && floor && (req.field == "safety_margin" || req.field == "cooling_interval")) {
      double& target = req.field == "safety_margin" ? margin : cooling;
      const double want = req.cmp == Comparator::Gt ? *num + 1 : *num;
      if (target < want) target = want;
      why.push_back("- [F] feedback requires " + text + " -> " + req.field + "=" + format_number(target));
    } else if (num && cap && req.field == "acoustic_power") {
      const double want = req.cmp == Comparator::Lt ? std::max(0.0, *num - 1) : *num;
      if (power > want) power = want;
      why.push_back("- [F] feedback requires " + text + " -> acoustic_power=" + format_number(power));
    } else if (str && req.cmp == Comparator::Eq && req.field == "patient_position" &&
               (*str == "supine" || *str == "prone")) {
      position = *str == "supine" ? PatientPosition::Supine : PatientPosition::Prone;
      why.push_back("- [F] feedback requires " + text);
    } else if (str && req.cmp == Comparator::Eq && req.field == "ablation_strategy") {
      p = apply_patch(p, {{"ablation_strategy", *str}});
      why.push_back("- [F] feedback requires " + text);
    } else {
      why.push_back("- [F] feedback requires " + text + ", no rule adjusts it");
    }
  }

  p.safety_margin = margin;
  p.cooling_interval = cooling;
  p.patient_position = position;
  if (dose) {
    p.predicted_total_energy = dose->predicted_dose_J;
    why.push_back("- [R6] predicted_total_energy copied from dose model " + dose->model_version);
  } else {
    p.predicted_total_energy = cfg_.nominal_energy_J;
    why.push_back("- [R6] no dose observation -> nominal energy " + format_number(cfg_.nominal_energy_J) + " J");
  }
  p.acoustic_power = power;
  p.sonication_duration = power > 0 ? std::round(p.predicted_total_energy / power * 10) / 10 : 0;
  why.push_back("- [R7] acoustic_power=" + format_number(power) + " W, sonication_duration=energy/power=" +
                format_number(p.sonication_duration) + " s");
  why.push_back("- [R8] cooling_interval=" + format_number(cooling) + " s; patient_position=" +
                std::string(to_string(position)));

  const double limit = cfg_.warning_factor * margin;
  if (seg) {
    std::vector<std::pair<std::string, const std::vector<seg::OarDistance>*>> sources;
    if (!seg->lesions.empty())
      for (const auto& l : seg->lesions) sources.emplace_back(l.id, &l.oar_distances);
    else
      sources.emplace_back("L1", &seg->oar_min_distance);
    for (const auto& [id, dists] : sources) {
      for (const auto& d : *dists) {
        if (d.mm && *d.mm < limit) {
          p.intraoperative_warnings.push_back(id + " lies " + fixed(*d.mm) + " mm from " + d.name + ", under " +
                                              format_number(cfg_.warning_factor) + "x safety_margin");
        }
      }
    }
  }
  why.push_back("- [R9] " + std::to_string(p.intraoperative_warnings.size()) +
                " OAR distance warning(s) below " + format_number(limit) + " mm");

  TreatmentPlan out;
  for (std::size_t i = 0; i < why.size(); ++i) out.reasoning_trace += (i ? "\n" : "") + why[i];
  out.plan = std::move(p);
  out.plan.validate();
  return out;
}

std::string ReferencePlanProvider::complete(const PromptBundle& bundle) const {
  return render_plan(plan_for(bundle));
}

}  // namespace fuas::strategy
