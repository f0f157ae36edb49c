#include "fuas/memory/embedding.hpp"

#include <cctype>
#include <cmath>

#include "fuas/memory/chunker.hpp"

namespace fuas::memory {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Eigen::Index HashingEmbedder::bucket(std::string_view first, std::string_view second) const {
  const std::uint64_t h = fnv1a(second, fnv1a("\x1f", fnv1a(first)));
  return static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim_));
}

Eigen::VectorXd HashingEmbedder::embed_raw(std::string_view text) const {
  auto tokens = tokenize(text);
  for (auto& t : tokens)
    for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  if (tokens.empty()) return v;
  v[bucket("<s>", tokens.front())] += 1.0;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) v[bucket(tokens[i], tokens[i + 1])] += 1.0;
  v[bucket(tokens.back(), "</s>")] += 1.0;
  return v / v.norm();
}

Eigen::VectorXd embed(std::string_view text, const EmbeddingProvider& provider) {
  if (tokenize(text).empty()) throw Error(ErrorCode::EmptyText, "cannot embed empty text");
  Eigen::VectorXd v = provider.embed_raw(text);
  if (v.size() != provider.dim() || !v.allFinite())
    throw Error(ErrorCode::ProviderFailure, provider.id() + " returned a malformed vector");
  if (std::abs(v.norm() - 1.0) > 1e-6) throw Error(ErrorCode::ProviderFailure, provider.id() + " returned a non-unit vector");
  return v;
}

}  // namespace fuas::memory
