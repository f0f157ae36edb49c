#include "fuas/segtool/phantom.hpp"

#include <random>

#include <nlohmann/json.hpp>

#include "fuas/core/error.hpp"

namespace fuas::seg {

using json = nlohmann::ordered_json;

namespace {

void check_ellipsoid(const Ellipsoid& e, const Grid& g, const std::string& what) {
  if (!(e.semi_axes_mm.array() > 0.0).all() || !e.semi_axes_mm.allFinite())
    throw Error(ErrorCode::InvalidValue, what + ": semi-axes must be > 0");
  if (!e.center_mm.allFinite() || !std::isfinite(e.intensity))
    throw Error(ErrorCode::InvalidValue, what + ": non-finite center or intensity");
  const Eigen::Array3d extent = (g.dims() - 1).cast<double>() * g.spacing();
  const Eigen::Array3d lo = e.center_mm.array() - e.semi_axes_mm.array();
  const Eigen::Array3d hi = e.center_mm.array() + e.semi_axes_mm.array();
  if ((lo < 0.0).any() || (hi > extent).any())
    throw Error(ErrorCode::EllipsoidOutOfBounds, what + " extends outside the volume");
}

Eigen::Vector3d vec3(const json& j, const char* key) {
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) throw Error(ErrorCode::MalformedDocument, std::string(key) + " needs 3 numbers");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

Ellipsoid ellipsoid_from(const json& j) {
  return {vec3(j, "center_mm"), vec3(j, "semi_axes_mm"), j.value("intensity", 1.0)};
}

json ellipsoid_to(const Ellipsoid& e) {
  return {{"center_mm", {e.center_mm.x(), e.center_mm.y(), e.center_mm.z()}},
          {"semi_axes_mm", {e.semi_axes_mm.x(), e.semi_axes_mm.y(), e.semi_axes_mm.z()}},
          {"intensity", e.intensity}};
}

}  // namespace

Phantom make_phantom(const PhantomSpec& spec) {
  const Grid& g = spec.grid;
  if (!(spec.noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidValue, "noise sigma < 0");
  for (std::size_t k = 0; k < spec.lesions.size(); ++k)
    check_ellipsoid(spec.lesions[k], g, "lesion " + std::to_string(k));
  for (const auto& o : spec.oars) check_ellipsoid(o.shape, g, "OAR " + o.name);

  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::ArrayXf intensity = Eigen::ArrayXf::Constant(n, static_cast<float>(spec.background));
  Eigen::ArrayXf truth = Eigen::ArrayXf::Zero(n);
  std::vector<Eigen::ArrayXf> oar_masks(spec.oars.size(), Eigen::ArrayXf::Zero(n));

  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d p = g.position_mm(g.coords(static_cast<std::size_t>(i)));
    for (std::size_t k = 0; k < spec.oars.size(); ++k) {
      if (spec.oars[k].shape.contains(p)) {
        oar_masks[k][i] = 1.0f;
        intensity[i] = static_cast<float>(spec.oars[k].shape.intensity);
      }
    }
    for (const auto& e : spec.lesions) {
      if (e.contains(p)) {
        truth[i] = 1.0f;
        intensity[i] = static_cast<float>(e.intensity);
      }
    }
  }

  if (spec.noise_sigma > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (Eigen::Index i = 0; i < n; ++i) intensity[i] += static_cast<float>(noise(rng));
  }

  Phantom out{Volume(g, std::move(intensity)), Mask(g, std::move(truth)), {}};
  for (std::size_t k = 0; k < spec.oars.size(); ++k)
    out.oars.emplace_back(spec.oars[k].name, Mask(g, std::move(oar_masks[k])));
  return out;
}

PhantomSpec parse_phantom_spec(std::string_view json_text) {
  json doc = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::MalformedDocument, "phantom spec is not an object");
  try {
    PhantomSpec s;
    const auto& d = doc.at("dims");
    const Eigen::Vector3d sp = doc.contains("spacing") ? vec3(doc, "spacing") : Eigen::Vector3d::Ones();
    s.grid = Grid(Eigen::Array3i(d.at(0).get<int>(), d.at(1).get<int>(), d.at(2).get<int>()), sp.array());
    s.background = doc.value("background", 0.0);
    s.noise_sigma = doc.value("noise_sigma", 0.0);
    s.seed = doc.value("seed", std::uint64_t{0});
    for (const auto& e : doc.value("lesions", json::array())) s.lesions.push_back(ellipsoid_from(e));
    for (const auto& o : doc.value("oars", json::array()))
      s.oars.push_back({o.at("name").get<std::string>(), ellipsoid_from(o)});
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
}

std::string serialize_phantom_spec(const PhantomSpec& s) {
  json doc;
  doc["dims"] = {s.grid.nx(), s.grid.ny(), s.grid.nz()};
  doc["spacing"] = {s.grid.spacing()[0], s.grid.spacing()[1], s.grid.spacing()[2]};
  doc["background"] = s.background;
  doc["noise_sigma"] = s.noise_sigma;
  doc["seed"] = s.seed;
  doc["lesions"] = json::array();
  for (const auto& e : s.lesions) doc["lesions"].push_back(ellipsoid_to(e));
  doc["oars"] = json::array();
  for (const auto& o : s.oars) {
    auto j = ellipsoid_to(o.shape);
    j["name"] = o.name;
    doc["oars"].push_back(j);
  }
  return doc.dump(2);
}

}  // namespace fuas::seg
