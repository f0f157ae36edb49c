#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fuas/core/case.hpp"
#include "fuas/dosemodel/dose.hpp"
#include "fuas/memory/index.hpp"
#include "fuas/segtool/descriptors.hpp"

namespace fuas::strategy {

inline constexpr std::string_view kDefaultSystemInstruction =
    "You are the planning agent of a focused ultrasound ablation team. Produce a REASONING block "
    "and then a PLAN block with exactly the ten plan keys, one \"key: value\" per line.";

/// Tool observations handed to the Strategy agent. Both absent when the
/// Executor is disabled.
struct Observations {
  std::optional<seg::SegObservation> seg;
  std::optional<dose::DoseObservation> dose;

  bool empty() const { return !seg && !dose; }
};

/// Structured planning prompt. Sections always render in the order system,
/// profile, observations, retrieved, query.
struct PromptBundle {
  std::string system_instruction;
  std::string patient_profile;
  std::string tool_observations;  // empty when there are none
  std::vector<std::string> retrieved_cases;
  std::string user_query;
  std::string feedback;  // optimizer feedback from a previous round, rendered inside the query section

  /// Structured copies of the observations for providers that do not parse text.
  Observations observations;
  std::vector<std::string> lesion_ids;  // from the segmentation, L1 when unknown

  std::string render() const;
};

/// Multi-line patient profile rendered from the case.
std::string render_profile(const CaseInput& c);

/// Builds the bundle; `retrieved` contributes its case-kind hits only.
PromptBundle assemble_prompt(const CaseInput& c, const Observations& obs, const std::string& query,
                             const std::optional<memory::RetrievalResult>& retrieved,
                             const std::string& feedback = "",
                             std::string system_instruction = std::string(kDefaultSystemInstruction));

}  // namespace fuas::strategy
