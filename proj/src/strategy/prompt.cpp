#include "fuas/strategy/prompt.hpp"

#include <sstream>

#include "fuas/core/predicate.hpp"
#include "fuas/core/stats.hpp"

namespace fuas::strategy {

namespace {

void section(std::ostringstream& os, std::string_view name, const std::string& body) {
  if (body.empty()) {
    os << name << ": none\n";
  } else {
    os << name << ":\n" << body;
    if (body.back() != '\n') os << '\n';
  }
}

}  // namespace

std::string render_profile(const CaseInput& c) {
  const auto& v = c.clinical_vars;
  std::ostringstream os;
  os << "case_id: " << c.case_id << '\n'
     << "bmi: " << format_number(v.bmi) << '\n'
     << "abdominal_wall_thickness_mm: " << format_number(v.abdominal_wall_thickness_mm) << '\n'
     << "preop_score: " << format_number(v.preop_score) << '\n'
     << "age: " << format_number(v.age) << '\n'
     << "ehr: " << (c.ehr_text.empty() ? "none" : c.ehr_text) << '\n';
  return os.str();
}

std::string PromptBundle::render() const {
  std::ostringstream os;
  section(os, "SYSTEM", system_instruction);
  os << '\n';
  section(os, "PATIENT PROFILE", patient_profile);
  os << '\n';
  section(os, "OBSERVATIONS", tool_observations);
  os << '\n';
  std::string retrieved;
  for (std::size_t i = 0; i < retrieved_cases.size(); ++i)
    retrieved += "[" + std::to_string(i + 1) + "] " + retrieved_cases[i] + "\n";
  section(os, "RETRIEVED CASES", retrieved);
  os << '\n';
  std::string query = user_query;
  if (!feedback.empty()) {
    if (!query.empty()) query += '\n';
    query += "FEEDBACK:\n" + feedback;
  }
  section(os, "QUERY", query);
  return os.str();
}

PromptBundle assemble_prompt(const CaseInput& c, const Observations& obs, const std::string& query,
                             const std::optional<memory::RetrievalResult>& retrieved, const std::string& feedback,
                             std::string system_instruction) {
  PromptBundle b;
  b.system_instruction = std::move(system_instruction);
  b.patient_profile = render_profile(c);
  if (obs.seg) b.tool_observations += obs.seg->to_text() + "\n";
  if (obs.dose) b.tool_observations += obs.dose->to_text() + "\n";
  if (retrieved) {
    for (const auto& hit : retrieved->hits) {
      if (hit.chunk.kind != memory::Kind::Case) continue;
      std::string text = hit.chunk.text;
      for (char& ch : text)
        if (ch == '\n' || ch == '\r') ch = ' ';
      b.retrieved_cases.push_back(hit.chunk.chunk_id + " (" + fixed(hit.score, 4) + "): " + text);
    }
  }
  b.user_query = query;
  b.feedback = feedback;
  b.observations = obs;
  if (obs.seg)
    for (const auto& l : obs.seg->lesions) b.lesion_ids.push_back(l.id);
  if (b.lesion_ids.empty()) b.lesion_ids.push_back("L1");
  return b;
}

}  // namespace fuas::strategy
