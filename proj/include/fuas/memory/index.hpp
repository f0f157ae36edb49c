#pragma once

#include <filesystem>
#include <memory>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fuas/memory/embedding.hpp"
#include "fuas/memory/knowledge.hpp"

namespace fuas::memory {

struct KnowledgeChunk {
  std::string chunk_id;
  std::string text;
  std::string source_doc;
  Kind kind = Kind::Guideline;
  Eigen::VectorXd vector;  // unit norm
  std::vector<GuidelineRule> rules;
};

struct ScoredChunk {
  KnowledgeChunk chunk;
  double score = 0;
};

struct RetrievalResult {
  std::string query;
  std::vector<ScoredChunk> hits;  // non-increasing score (rounded to 1e-12), ties by ascending chunk_id
};

/// Input to VectorIndex::add; the index embeds the text.
struct ChunkInput {
  std::string chunk_id;
  std::string text;
  std::string source_doc;
  Kind kind = Kind::Guideline;
  std::vector<GuidelineRule> rules;
};

/// Exact flat cosine index. Concurrent retrievals share the lock; insertions
/// take it exclusively.
class VectorIndex {
 public:
  explicit VectorIndex(std::shared_ptr<const EmbeddingProvider> provider);
  /// Not synchronized; only move an index no other thread is using.
  VectorIndex(VectorIndex&& other) noexcept
      : provider_(std::move(other.provider_)), chunks_(std::move(other.chunks_)) {}

  /// Throws InvalidValue for a duplicate or empty id, EmptyText for empty text.
  std::vector<std::string> add(const std::vector<ChunkInput>& chunks);

  /// Top-k by cosine among chunks whose kind is in `kinds` (all kinds when empty).
  /// Throws EmptyIndex when nothing is stored, InvalidValue when k == 0.
  RetrievalResult retrieve(std::string_view query, std::size_t k = 3, const std::set<Kind>& kinds = {}) const;

  std::size_t size() const;
  bool has_source(std::string_view source) const;
  std::vector<KnowledgeChunk> chunks() const;
  const EmbeddingProvider& provider() const { return *provider_; }

  /// Single JSON file: provider id, dimension, chunks with vectors and rules.
  void save(const std::filesystem::path& path) const;
  /// Throws ConfigError when the stored provider id differs from `provider`.
  static VectorIndex load(const std::filesystem::path& path, std::shared_ptr<const EmbeddingProvider> provider);

 private:
  std::shared_ptr<const EmbeddingProvider> provider_;
  mutable std::shared_mutex mutex_;
  std::vector<KnowledgeChunk> chunks_;
};

/// Chunks each document (window/overlap in whitespace tokens) and adds the
/// chunks; a document's rules are attached to each of its chunks. Chunk ids are
/// "<source>#<4-digit index>".
std::vector<std::string> ingest(VectorIndex& index, const std::vector<KnowledgeDocument>& docs,
                                std::size_t window = 512, std::size_t overlap = 50);

}  // namespace fuas::memory
