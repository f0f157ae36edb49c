#include "fuas/dosemodel/table.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "fuas/core/case.hpp"
#include "fuas/core/error.hpp"
#include "fuas/core/predicate.hpp"

namespace fuas::dose {

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = line.find(',');
    auto cell = line.substr(0, pos);
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.remove_suffix(1);
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    out.push_back(cell);
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  return out;
}

}  // namespace

void TrainingTable::validate() const {
  const auto n = dose.size();
  if (features.rows() != n || clinical.rows() != n)
    throw Error(ErrorCode::SchemaMismatch, "row counts differ between features, clinical and dose");
  if (static_cast<std::size_t>(features.cols()) != feature_names.size())
    throw Error(ErrorCode::SchemaMismatch, "feature name count differs from feature columns");
  if (clinical.cols() != 4) throw Error(ErrorCode::SchemaMismatch, "clinical matrix needs 4 columns");
  std::set<std::string> seen;
  for (const auto& name : feature_names)
    if (!seen.insert(name).second) throw Error(ErrorCode::SchemaMismatch, "duplicate column " + name);
  if (!features.allFinite() || !clinical.allFinite() || !dose.allFinite())
    throw Error(ErrorCode::NonFiniteInput, "training table has missing or non-finite values");
}

TrainingTable parse_training_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto pos = text.find('\n');
    auto line = text.substr(0, pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  if (lines.empty()) throw Error(ErrorCode::MalformedDocument, "training CSV needs a header row");
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 5 || header.back() != kDoseColumn)
    throw Error(ErrorCode::SchemaMismatch, "header must end with the clinical columns and dose_J");
  const std::size_t d = header.size() - 5;
  for (std::size_t k = 0; k < 4; ++k)
    if (header[d + k] != kClinicalNames[k])
      throw Error(ErrorCode::SchemaMismatch, "expected clinical column " + std::string(kClinicalNames[k]));

  TrainingTable t;
  for (std::size_t k = 0; k < d; ++k) t.feature_names.emplace_back(header[k]);
  const auto n = static_cast<Eigen::Index>(lines.size() - 1);
  t.features.resize(n, static_cast<Eigen::Index>(d));
  t.clinical.resize(n, 4);
  t.dose.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto cells = split_csv_line(lines[static_cast<std::size_t>(r) + 1]);
    if (cells.size() != header.size())
      throw Error(ErrorCode::MalformedDocument, "row " + std::to_string(r + 1) + " has wrong column count");
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0;
      auto [ptr, ec] = std::from_chars(cells[c].data(), cells[c].data() + cells[c].size(), v);
      if (ec != std::errc() || ptr != cells[c].data() + cells[c].size() || cells[c].empty())
        throw Error(ErrorCode::NonFiniteInput, "row " + std::to_string(r + 1) + " column " + std::string(header[c]) +
                                                   " is missing or not numeric");
      if (c < d)
        t.features(r, static_cast<Eigen::Index>(c)) = v;
      else if (c < d + 4)
        t.clinical(r, static_cast<Eigen::Index>(c - d)) = v;
      else
        t.dose[r] = v;
    }
  }
  t.validate();
  return t;
}

std::string to_csv(const TrainingTable& t) {
  t.validate();
  std::ostringstream os;
  for (const auto& name : t.feature_names) os << name << ',';
  for (auto name : kClinicalNames) os << name << ',';
  os << kDoseColumn << '\n';
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    for (Eigen::Index c = 0; c < t.features.cols(); ++c) os << format_number(t.features(r, c)) << ',';
    for (Eigen::Index c = 0; c < 4; ++c) os << format_number(t.clinical(r, c)) << ',';
    os << format_number(t.dose[r]) << '\n';
  }
  return os.str();
}

}  // namespace fuas::dose
