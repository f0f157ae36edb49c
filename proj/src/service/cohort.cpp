#include "fuas/service/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>

#include "fuas/core/volume_io.hpp"
#include "fuas/dosemodel/icc.hpp"
#include "fuas/radiomics/features.hpp"

namespace fuas::service {

namespace {

constexpr double kSpacing = 1.5;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

ClinicalVariables draw_clinical(std::mt19937_64& rng) {
  ClinicalVariables c;
  c.bmi = std::round(uniform(rng, 18, 34) * 10) / 10;
  c.abdominal_wall_thickness_mm = std::round(uniform(rng, 10, 40));
  c.preop_score = std::floor(uniform(rng, 0, 4));
  c.age = std::round(uniform(rng, 25, 55));
  return c;
}

Eigen::RowVectorXd row_of(const radiomics::FeatureVector& f) { return f.values().transpose(); }

}  // namespace

seg::RegionGrowingOptions phantom_segmentation_options() {
  seg::RegionGrowingOptions o;
  o.tau = 0.3;
  o.threshold = 0.7;
  o.min_voxels = 8;
  return o;
}

PhantomCase make_phantom_case(const std::string& case_id, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PhantomCase pc;
  auto& s = pc.spec;
  s.grid = Grid(Eigen::Array3i(40, 40, 40), Eigen::Array3d::Constant(kSpacing));
  s.background = 0;
  s.noise_sigma = kPhantomNoise;
  s.seed = seed;

  seg::Ellipsoid l1;
  const double a = uniform(rng, 4, 6);
  l1.center_mm = Eigen::Vector3d(14 + uniform(rng, -1, 1), 20 + uniform(rng, -1, 1), 29 + uniform(rng, -1, 1));
  l1.semi_axes_mm = Eigen::Vector3d(a, a * uniform(rng, 0.8, 1.1), a * uniform(rng, 0.8, 1.1));
  l1.intensity = kLesionIntensity;
  s.lesions.push_back(l1);
  if (uniform(rng, 0, 1) < 0.3) {
    seg::Ellipsoid l2;
    const double b = uniform(rng, 3, 3.8);
    l2.center_mm = Eigen::Vector3d(14 + uniform(rng, -1, 1), 44 + uniform(rng, -1, 1), 29);
    l2.semi_axes_mm = Eigen::Vector3d::Constant(b);
    l2.intensity = kLesionIntensity;
    s.lesions.push_back(l2);
  }

  const double gap = uniform(rng, 3, 28);
  seg::OrganAtRisk bowel{"bowel", {}};
  bowel.shape.semi_axes_mm = Eigen::Vector3d(5, 8, 8);
  bowel.shape.center_mm =
      Eigen::Vector3d(l1.center_mm.x() + l1.semi_axes_mm.x() + gap + 5, l1.center_mm.y(), l1.center_mm.z());
  bowel.shape.intensity = kOarIntensity;
  s.oars.push_back(bowel);

  pc.phantom = seg::make_phantom(s);

  auto& in = pc.input;
  in.case_id = case_id;
  in.volume_ref = case_id + "/volume.rvol";
  in.oar_refs = {case_id + "/oar_bowel.rmsk"};
  in.clinical_vars = draw_clinical(rng);
  in.ehr_text = "Symptomatic uterine fibroid" + std::string(s.lesions.size() > 1 ? "s" : "") +
                " with menorrhagia; bowel loop anterior to the lesion; no prior ablation.";
  in.clinician_query = "Propose a focused ultrasound ablation plan for the segmented lesion(s).";
  return pc;
}

void write_phantom_case(const PhantomCase& pc, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / pc.input.case_id);
  write_volume(dir / pc.input.volume_ref, pc.phantom.volume);
  for (std::size_t i = 0; i < pc.phantom.oars.size() && i < pc.input.oar_refs.size(); ++i)
    write_mask(dir / pc.input.oar_refs[i], pc.phantom.oars[i].second);
}

std::vector<PhantomCase> make_suite(std::size_t n, std::uint64_t base_seed) {
  std::vector<PhantomCase> out;
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "suite-%02zu", i);
    out.push_back(make_phantom_case(id, base_seed + i));
  }
  return out;
}

DoseCohort make_dose_cohort(std::size_t n, std::uint64_t seed, std::size_t n_replicates) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 500.0);
  DoseCohort out;
  out.table.feature_names = radiomics::feature_names();
  const auto d = static_cast<Eigen::Index>(out.table.feature_names.size());
  const auto rows = static_cast<Eigen::Index>(n);
  out.table.features.resize(rows, d);
  out.table.clinical.resize(rows, 4);
  out.table.dose.resize(rows);
  out.replicates.assign(n_replicates, Eigen::MatrixXd(rows, d));

  for (Eigen::Index i = 0; i < rows; ++i) {
    seg::PhantomSpec s;
    s.grid = Grid(Eigen::Array3i(32, 32, 32), Eigen::Array3d::Constant(kSpacing));
    s.noise_sigma = kPhantomNoise;
    s.seed = seed * 1000003 + static_cast<std::uint64_t>(i);
    seg::Ellipsoid e;
    e.center_mm = Eigen::Vector3d::Constant(23.25);
    e.semi_axes_mm = Eigen::Vector3d(uniform(rng, 3, 8), uniform(rng, 3, 8), uniform(rng, 3, 8));
    e.intensity = uniform(rng, 0.8, 1.2);
    s.lesions.push_back(e);
    const seg::Phantom ph = seg::make_phantom(s);
    const ClinicalVariables c = draw_clinical(rng);

    out.table.features.row(i) = row_of(radiomics::extract(ph.volume, ph.truth));
    for (std::size_t r = 0; r < n_replicates; ++r) {
      const Mask jittered = dose::jitter_mask(ph.truth, s.seed * 31 + r);
      out.replicates[r].row(i) = row_of(radiomics::extract(ph.volume, jittered));
    }
    out.table.clinical.row(i) << c.bmi, c.abdominal_wall_thickness_mm, c.preop_score, c.age;
    const double volume = ph.truth.count() * s.grid.voxel_volume();
    const double dose = 6000 + 12 * volume + 250 * (c.bmi - 22) + 120 * (c.abdominal_wall_thickness_mm - 20) +
                        3000 * (e.intensity - 1) + noise(rng);
    out.table.dose[i] = std::clamp(dose, 2000.0, 55000.0);
  }
  out.table.validate();
  return out;
}

std::shared_ptr<const dose::DoseModel> default_dose_model() {
  static std::once_flag once;
  static std::shared_ptr<const dose::DoseModel> model;
  std::call_once(once, [] {
    const DoseCohort cohort = make_dose_cohort();
    model = std::make_shared<const dose::DoseModel>(dose::train_dose_model(cohort.table, cohort.replicates).model);
  });
  return model;
}

}  // namespace fuas::service
