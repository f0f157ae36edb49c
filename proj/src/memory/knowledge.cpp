#include "fuas/memory/knowledge.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fuas/core/error.hpp"
#include "fuas/core/schema.hpp"

namespace fuas::memory {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = text.find('\n');
    auto line = text.substr(0, pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return out;
}

}  // namespace

std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::Guideline: return "guideline";
    case Kind::Case: return "case";
    case Kind::Contraindication: return "contraindication";
  }
  return "?";
}

Kind parse_kind(std::string_view s) {
  if (s == "guideline") return Kind::Guideline;
  if (s == "case") return Kind::Case;
  if (s == "contraindication") return Kind::Contraindication;
  throw Error(ErrorCode::MalformedDocument, "unknown knowledge kind '" + std::string(s) + "'");
}

std::string GuidelineRule::to_text() const {
  return "RULE " + rule_id + ": if " + (applicability ? applicability->to_string() : std::string("always")) +
         " then require " + requirement.to_string() + " :: " + message;
}

GuidelineRule parse_rule(std::string_view line, std::string_view fallback_id) {
  auto body = trim(line);
  if (!body.starts_with("RULE")) throw Error(ErrorCode::MalformedDocument, "rule must start with RULE");
  body.remove_prefix(4);
  const auto colon = body.find(':');
  if (colon == std::string_view::npos) throw Error(ErrorCode::MalformedDocument, "rule needs ':'");
  GuidelineRule r;
  r.rule_id = std::string(trim(body.substr(0, colon)));
  if (r.rule_id.empty()) r.rule_id = std::string(fallback_id);
  body = trim(body.substr(colon + 1));

  const auto sep = body.find("::");
  if (sep == std::string_view::npos) throw Error(ErrorCode::MalformedDocument, "rule needs ':: message'");
  r.message = std::string(trim(body.substr(sep + 2)));
  body = trim(body.substr(0, sep));
  if (!body.starts_with("if ")) throw Error(ErrorCode::MalformedDocument, "rule must read 'if ... then require ...'");
  body.remove_prefix(3);
  const auto then = body.find(" then require ");
  if (then == std::string_view::npos) throw Error(ErrorCode::MalformedDocument, "rule needs 'then require'");
  const auto cond = trim(body.substr(0, then));
  if (cond != "always") r.applicability = parse_predicate(cond);
  r.requirement = parse_predicate(body.substr(then + 14));

  if (r.applicability && !is_case_fact_key(r.applicability->field))
    throw Error(ErrorCode::MalformedDocument, "rule " + r.rule_id + ": unknown case field " + r.applicability->field);
  if (!is_plan_key(r.requirement.field))
    throw Error(ErrorCode::MalformedDocument, "rule " + r.rule_id + ": unknown plan field " + r.requirement.field);
  if (r.message.empty()) throw Error(ErrorCode::MalformedDocument, "rule " + r.rule_id + " has no message");
  return r;
}

KnowledgeDocument parse_knowledge_document(std::string_view text, std::string_view fallback_source) {
  const auto lines = lines_of(text);
  KnowledgeDocument doc;
  doc.source = std::string(fallback_source);
  std::size_t body_start = 0;
  if (!lines.empty() && trim(lines[0]) == "---") {
    std::size_t i = 1;
    bool closed = false;
    std::vector<std::string_view> rule_lines;
    bool has_kind = false;
    for (; i < lines.size(); ++i) {
      const auto line = trim(lines[i]);
      if (line == "---") {
        closed = true;
        break;
      }
      if (line.empty() || line.starts_with("#")) continue;
      if (line.starts_with("RULE")) {
        rule_lines.push_back(line);
        continue;
      }
      const auto colon = line.find(':');
      if (colon == std::string_view::npos)
        throw Error(ErrorCode::MalformedDocument, "front matter line without ':' in " + doc.source);
      const auto key = trim(line.substr(0, colon));
      const auto value = trim(line.substr(colon + 1));
      if (key == "kind") {
        doc.kind = parse_kind(value);
        has_kind = true;
      } else if (key == "source") {
        doc.source = std::string(value);
      }
    }
    if (!closed) throw Error(ErrorCode::MalformedDocument, "unterminated front matter in " + doc.source);
    if (!has_kind) throw Error(ErrorCode::MalformedDocument, "front matter lacks 'kind' in " + doc.source);
    for (std::size_t k = 0; k < rule_lines.size(); ++k)
      doc.rules.push_back(parse_rule(rule_lines[k], doc.source + "/R" + std::to_string(k + 1)));
    body_start = i + 1;
  }
  std::ostringstream body;
  for (std::size_t i = body_start; i < lines.size(); ++i) body << lines[i] << '\n';
  doc.body = std::string(trim(body.str()));
  return doc;
}

std::vector<KnowledgeDocument> load_knowledge_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && (e.path().extension() == ".md" || e.path().extension() == ".txt"))
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<KnowledgeDocument> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + f.string());
    std::stringstream ss;
    ss << in.rdbuf();
    out.push_back(parse_knowledge_document(ss.str(), f.stem().string()));
  }
  return out;
}

}  // namespace fuas::memory
