#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "fuas/core/volume.hpp"

namespace fuas::dose {

/// One-way random-effects ICC(1,1) of an n_subjects x k_raters matrix.
/// nullopt when the ratings have zero total variance.
std::optional<double> icc_1_1(const Eigen::MatrixXd& ratings);

struct IccResult {
  std::vector<std::optional<double>> icc;  // per column
  std::vector<std::size_t> retained;       // columns with icc >= threshold
};

/// `replicates[r]` is the n x d feature matrix re-extracted under perturbation r.
/// Throws TooFewReplicates (R < 2) or SchemaMismatch (shapes differ).
IccResult icc_filter(const std::vector<Eigen::MatrixXd>& replicates, double threshold = 0.75);

/// Seeded one-voxel boundary jitter: each voxel on the inner or outer 6-boundary
/// flips with probability `flip_probability`. Never returns an empty mask for a
/// nonempty input.
Mask jitter_mask(const Mask& m, std::uint64_t seed, double flip_probability = 0.3);

}  // namespace fuas::dose
