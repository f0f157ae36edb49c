#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "fuas/strategy/plan.hpp"
#include "fuas/strategy/prompt.hpp"

namespace fuas::strategy {

/// Plan-generation backend. Implementations return raw text that should
/// contain a REASONING block followed by a PLAN block.
class PlanProvider {
 public:
  virtual ~PlanProvider() = default;
  virtual std::string id() const = 0;
  /// False when calls must not overlap; generate() then serializes them.
  virtual bool reentrant() const = 0;
  virtual std::string complete(const PromptBundle& bundle) const = 0;
};

/// Whitespace token count.
std::size_t count_tokens(std::string_view text);

struct TokenBudget {
  std::size_t max_prompt_tokens = 8192;
  std::size_t max_output_tokens = 4096;
};

struct Generation {
  std::string prompt_text;
  std::string output_text;
  std::size_t prompt_tokens = 0;
  std::size_t output_tokens = 0;
};

/// Throws TokenBudgetExceeded, or ProviderFailure when the provider throws or
/// breaks the output contract.
Generation generate(const PromptBundle& bundle, const PlanProvider& provider, const TokenBudget& budget = {});

struct ReferenceProviderConfig {
  double margin_floor_mm = 10;
  double acoustic_power_W = 300;
  double cooling_interval_s = 6;
  double nominal_energy_J = 20000;
  double warning_factor = 2;
  PatientPosition patient_position = PatientPosition::Prone;
};

/// Deterministic rule-table generator. Reads the structured observations and
/// any "(requires <predicate>)" clauses in the feedback; ignores query wording.
class ReferencePlanProvider final : public PlanProvider {
 public:
  explicit ReferencePlanProvider(ReferenceProviderConfig cfg = {});
  std::string id() const override { return "reference-rules-v1"; }
  bool reentrant() const override { return true; }
  std::string complete(const PromptBundle& bundle) const override;

  TreatmentPlan plan_for(const PromptBundle& bundle) const;
  const ReferenceProviderConfig& config() const { return cfg_; }

 private:
  ReferenceProviderConfig cfg_;
};

}  // namespace fuas::strategy
