#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "fuas/core/error.hpp"

namespace fuas::memory {

/// Text -> unit vector. Must be deterministic per (provider, text).
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string id() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual Eigen::VectorXd embed_raw(std::string_view text) const = 0;
};

/// Lower-cased token bigrams (with start/end markers) hashed into `dim` buckets.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(Eigen::Index dim = 256) : dim_(dim) {}
  std::string id() const override { return "hashing-bigram-" + std::to_string(dim_); }
  Eigen::Index dim() const override { return dim_; }
  Eigen::VectorXd embed_raw(std::string_view text) const override;

  /// Bucket of one bigram; exposed so tests can build collision-free pairs.
  Eigen::Index bucket(std::string_view first, std::string_view second) const;

 private:
  Eigen::Index dim_;
};

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull);

/// Validates the provider contract: EmptyText for blank input, ProviderFailure
/// for a wrong dimension or a non-unit output.
Eigen::VectorXd embed(std::string_view text, const EmbeddingProvider& provider);

/// u·v / (‖u‖‖v‖), clamped to [-1, 1]. Throws DimMismatch or ZeroVector.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_sim(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  if (u.size() != v.size()) throw Error(ErrorCode::DimMismatch, "cosine_sim: vector sizes differ");
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) throw Error(ErrorCode::ZeroVector, "cosine_sim: zero-norm vector");
  const Scalar c = u.dot(v) / (nu * nv);
  return std::max(Scalar(-1), std::min(Scalar(1), c));
}

}  // namespace fuas::memory
