#include "fuas/segtool/prompt.hpp"

#include <charconv>
#include <sstream>

#include "fuas/core/error.hpp"

namespace fuas::seg {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

int to_int(std::string_view s, std::string_view spec) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorCode::MalformedDocument, "bad coordinate in prompt '" + std::string(spec) + "'");
  return v;
}

void require_inside(const Eigen::Array3i& c, const Grid& g) {
  if (!g.contains(c[0], c[1], c[2])) {
    std::ostringstream os;
    os << "voxel (" << c[0] << "," << c[1] << "," << c[2] << ") outside " << g.nx() << "x" << g.ny() << "x" << g.nz();
    throw Error(ErrorCode::PromptOutOfBounds, os.str());
  }
}

}  // namespace

void validate_prompt(const Prompt& p, const Grid& grid) {
  if (const auto* click = std::get_if<ClickPrompt>(&p)) {
    bool any_positive = false;
    for (const auto& pt : click->points) {
      require_inside(pt.voxel, grid);
      any_positive = any_positive || pt.positive;
    }
    if (!any_positive) throw Error(ErrorCode::NoPositiveSeed, "click prompt needs at least one positive point");
  } else if (const auto* box = std::get_if<BoxPrompt>(&p)) {
    require_inside(box->lo, grid);
    require_inside(box->hi, grid);
  }
}

Prompt parse_prompt(std::string_view spec) {
  if (spec == "auto") return AutonomyPrompt{};
  if (spec.starts_with("click:")) {
    ClickPrompt click;
    for (auto item : split(spec.substr(6), ';')) {
      if (item.empty()) continue;
      const auto parts = split(item, ',');
      if (parts.size() != 4 || (parts[3] != "+" && parts[3] != "-"))
        throw Error(ErrorCode::MalformedDocument, "click point must be x,y,z,+|-: '" + std::string(item) + "'");
      click.points.push_back(
          {Eigen::Array3i(to_int(parts[0], spec), to_int(parts[1], spec), to_int(parts[2], spec)), parts[3] == "+"});
    }
    if (click.points.empty()) throw Error(ErrorCode::MalformedDocument, "click prompt has no points");
    return click;
  }
  if (spec.starts_with("bbox:")) {
    const auto parts = split(spec.substr(5), ',');
    if (parts.size() != 6) throw Error(ErrorCode::MalformedDocument, "bbox needs 6 coordinates");
    Eigen::Array3i a(to_int(parts[0], spec), to_int(parts[1], spec), to_int(parts[2], spec));
    Eigen::Array3i b(to_int(parts[3], spec), to_int(parts[4], spec), to_int(parts[5], spec));
    return BoxPrompt::from_corners(a, b);
  }
  throw Error(ErrorCode::MalformedDocument, "unknown prompt '" + std::string(spec) + "'");
}

std::string format_prompt(const Prompt& p) {
  std::ostringstream os;
  if (std::holds_alternative<AutonomyPrompt>(p)) {
    os << "auto";
  } else if (const auto* click = std::get_if<ClickPrompt>(&p)) {
    os << "click:";
    for (std::size_t i = 0; i < click->points.size(); ++i) {
      const auto& pt = click->points[i];
      os << (i ? ";" : "") << pt.voxel[0] << ',' << pt.voxel[1] << ',' << pt.voxel[2] << ','
         << (pt.positive ? '+' : '-');
    }
  } else {
    const auto& b = std::get<BoxPrompt>(p);
    os << "bbox:" << b.lo[0] << ',' << b.lo[1] << ',' << b.lo[2] << ',' << b.hi[0] << ',' << b.hi[1] << ','
       << b.hi[2];
  }
  return os.str();
}

}  // namespace fuas::seg
