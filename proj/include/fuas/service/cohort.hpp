#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fuas/core/case.hpp"
#include "fuas/dosemodel/dose.hpp"
#include "fuas/dosemodel/table.hpp"
#include "fuas/segtool/phantom.hpp"
#include "fuas/segtool/segment.hpp"

namespace fuas::service {

/// Intensities used by every generated planning phantom.
inline constexpr double kLesionIntensity = 1.0;
inline constexpr double kOarIntensity = 0.35;
inline constexpr double kPhantomNoise = 0.03;

/// Region-growing settings matched to the phantom intensities above.
seg::RegionGrowingOptions phantom_segmentation_options();

struct PhantomCase {
  seg::PhantomSpec spec;
  seg::Phantom phantom;
  CaseInput input;  // refs are relative: "<case_id>/volume.rvol", "<case_id>/oar_<name>.rmsk"
};

/// 40^3 grid at 1.5 mm: one or two lesions and a bowel OAR at a seeded gap
/// (3..28 mm from L1), plus seeded clinical variables.
PhantomCase make_phantom_case(const std::string& case_id, std::uint64_t seed);

/// Writes the volume and OAR masks under `dir`; the case refs resolve against `dir`.
void write_phantom_case(const PhantomCase& pc, const std::filesystem::path& dir);

/// Case ids "suite-00".."suite-<n-1>" with seeds base_seed + i.
std::vector<PhantomCase> make_suite(std::size_t n = 20, std::uint64_t base_seed = 1000);

/// Synthetic dose-training cohort: single-lesion phantoms, radiomics on the
/// true mask, `n_replicates` jittered re-extractions, dose from a known
/// volume/clinical formula plus noise.
struct DoseCohort {
  dose::TrainingTable table;
  std::vector<Eigen::MatrixXd> replicates;
};
DoseCohort make_dose_cohort(std::size_t n = 80, std::uint64_t seed = 7, std::size_t n_replicates = 3);

/// Trains on make_dose_cohort() once per process and caches the model.
std::shared_ptr<const dose::DoseModel> default_dose_model();

}  // namespace fuas::service
