#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fuas/core/predicate.hpp"

namespace fuas::memory {

enum class Kind { Guideline, Case, Contraindication };

std::string_view to_string(Kind k);
/// Throws MalformedDocument for an unknown kind.
Kind parse_kind(std::string_view s);

/// Machine-checkable guideline: when `applicability` holds on the case facts,
/// `requirement` must hold on the plan. No applicability means always applicable.
struct GuidelineRule {
  std::string rule_id;
  std::optional<Predicate> applicability;
  Predicate requirement;
  std::string message;

  bool operator==(const GuidelineRule&) const = default;
  /// "RULE <id>: if <pred>|always then require <pred> :: <message>"
  std::string to_text() const;
};

/// Parses the body after "RULE[ id]:". Throws MalformedDocument, including for
/// fields outside the case-fact or plan schemas.
GuidelineRule parse_rule(std::string_view line, std::string_view fallback_id);

/// One ingestion file: front matter (kind, source, RULE lines) then body text.
struct KnowledgeDocument {
  std::string source;
  Kind kind = Kind::Guideline;
  std::vector<GuidelineRule> rules;
  std::string body;
};

/// Front matter is delimited by "---" lines. `fallback_source` names the
/// document when no "source:" key is given.
KnowledgeDocument parse_knowledge_document(std::string_view text, std::string_view fallback_source);

/// Every .md / .txt file in `dir`, sorted by filename.
std::vector<KnowledgeDocument> load_knowledge_dir(const std::filesystem::path& dir);

}  // namespace fuas::memory
