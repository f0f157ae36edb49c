#include "fuas/core/predicate.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "fuas/core/error.hpp"

namespace fuas {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<double> to_number(std::string_view s) {
  double v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

struct Token {
  std::string_view text;
  Comparator cmp;
};

// Longest spellings first so "<=" wins over "<".
constexpr Token kComparators[] = {
    {"<=", Comparator::Le}, {">=", Comparator::Ge}, {"==", Comparator::Eq}, {"!=", Comparator::Ne},
    {"≤", Comparator::Le},  {"≥", Comparator::Ge},  {"∈", Comparator::In},  {" in ", Comparator::In},
    {"<", Comparator::Lt},  {">", Comparator::Gt},  {"=", Comparator::Eq},
};

}  // namespace

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Gt: return ">";
    case Comparator::Ge: return ">=";
    case Comparator::Eq: return "==";
    case Comparator::Ne: return "!=";
    case Comparator::In: return "in";
  }
  return "?";
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_field(const FieldValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  return std::get<std::string>(v);
}

bool Predicate::holds(const FieldValue& value) const {
  if (const auto* set = std::get_if<std::vector<std::string>>(&bound)) {
    const auto text = format_field(value);
    bool found = false;
    for (const auto& s : *set) found = found || s == text;
    if (cmp == Comparator::In || cmp == Comparator::Eq) return found;
    if (cmp == Comparator::Ne) return !found;
    throw Error(ErrorCode::InvalidValue, "ordering comparator against a set in '" + to_string() + "'");
  }
  if (const auto* b = std::get_if<double>(&bound)) {
    const auto* x = std::get_if<double>(&value);
    if (x == nullptr) throw Error(ErrorCode::InvalidValue, "text value for numeric predicate '" + to_string() + "'");
    switch (cmp) {
      case Comparator::Lt: return *x < *b;
      case Comparator::Le: return *x <= *b;
      case Comparator::Gt: return *x > *b;
      case Comparator::Ge: return *x >= *b;
      case Comparator::Eq: return *x == *b;
      case Comparator::Ne: return *x != *b;
      case Comparator::In: return *x == *b;
    }
  }
  const auto& s = std::get<std::string>(bound);
  const auto text = format_field(value);
  switch (cmp) {
    case Comparator::Eq:
    case Comparator::In: return text == s;
    case Comparator::Ne: return text != s;
    default: throw Error(ErrorCode::InvalidValue, "ordering comparator on text in '" + to_string() + "'");
  }
}

bool Predicate::holds_in(const FieldMap& fields) const {
  auto it = fields.find(field);
  if (it == fields.end()) return false;
  return holds(it->second);
}

std::string Predicate::to_string() const {
  std::ostringstream os;
  os << field << ' ' << fuas::to_string(cmp) << ' ';
  if (const auto* d = std::get_if<double>(&bound)) {
    os << format_number(*d);
  } else if (const auto* s = std::get_if<std::string>(&bound)) {
    os << *s;
  } else {
    os << '{';
    const auto& set = std::get<std::vector<std::string>>(bound);
    for (std::size_t i = 0; i < set.size(); ++i) os << (i ? ", " : "") << set[i];
    os << '}';
  }
  return os.str();
}

Predicate parse_predicate(std::string_view text) {
  const auto body = trim(text);
  for (const auto& tok : kComparators) {
    const auto pos = body.find(tok.text);
    if (pos == std::string_view::npos || pos == 0) continue;
    Predicate p;
    p.field = std::string(trim(body.substr(0, pos)));
    p.cmp = tok.cmp;
    const auto rhs = trim(body.substr(pos + tok.text.size()));
    if (p.field.empty() || rhs.empty() || p.field.find(' ') != std::string::npos)
      throw Error(ErrorCode::MalformedDocument, "bad predicate '" + std::string(body) + "'");
    if (p.cmp == Comparator::In) {
      if (rhs.size() < 2 || rhs.front() != '{' || rhs.back() != '}')
        throw Error(ErrorCode::MalformedDocument, "set bound must be {a, b}: '" + std::string(body) + "'");
      std::vector<std::string> items;
      std::string_view inner = rhs.substr(1, rhs.size() - 2);
      while (!inner.empty()) {
        const auto comma = inner.find(',');
        const auto item = trim(inner.substr(0, comma));
        if (!item.empty()) items.emplace_back(item);
        if (comma == std::string_view::npos) break;
        inner.remove_prefix(comma + 1);
      }
      p.bound = std::move(items);
    } else if (auto num = to_number(rhs)) {
      p.bound = *num;
    } else {
      p.bound = std::string(rhs);
    }
    return p;
  }
  throw Error(ErrorCode::MalformedDocument, "no comparator in '" + std::string(body) + "'");
}

}  // namespace fuas
