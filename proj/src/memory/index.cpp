#include "fuas/memory/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fuas/core/error.hpp"
#include "fuas/memory/chunker.hpp"

namespace fuas::memory {

using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kIndexFormat = "fuas-knowledge-index";

/// Nearest multiple of 1e-12.
double snap(double score) { return std::nearbyint(score * 1e12) / 1e12; }

bool ranks_before(const ScoredChunk& a, const ScoredChunk& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.chunk.chunk_id < b.chunk.chunk_id;
}

}  // namespace

VectorIndex::VectorIndex(std::shared_ptr<const EmbeddingProvider> provider) : provider_(std::move(provider)) {
  if (!provider_) throw Error(ErrorCode::ConfigError, "index needs an embedding provider");
}

std::vector<std::string> VectorIndex::add(const std::vector<ChunkInput>& inputs) {
  // Embed outside the lock; only the insertion is exclusive.
  std::vector<KnowledgeChunk> staged;
  for (const auto& in : inputs) {
    if (in.chunk_id.empty()) throw Error(ErrorCode::InvalidValue, "chunk id is empty");
    staged.push_back({in.chunk_id, in.text, in.source_doc, in.kind, embed(in.text, *provider_), in.rules});
  }
  std::unique_lock lock(mutex_);
  for (std::size_t i = 0; i < staged.size(); ++i) {
    const auto& id = staged[i].chunk_id;
    const bool dup_existing =
        std::any_of(chunks_.begin(), chunks_.end(), [&](const KnowledgeChunk& c) { return c.chunk_id == id; });
    const bool dup_batch = std::any_of(staged.begin(), staged.begin() + static_cast<std::ptrdiff_t>(i),
                                       [&](const KnowledgeChunk& c) { return c.chunk_id == id; });
    if (dup_existing || dup_batch) throw Error(ErrorCode::InvalidValue, "duplicate chunk id " + id);
  }
  std::vector<std::string> ids;
  for (auto& c : staged) {
    ids.push_back(c.chunk_id);
    chunks_.push_back(std::move(c));
  }
  return ids;
}

RetrievalResult VectorIndex::retrieve(std::string_view query, std::size_t k, const std::set<Kind>& kinds) const {
  if (k == 0) throw Error(ErrorCode::InvalidValue, "k must be >= 1");
  const Eigen::VectorXd q = embed(query, *provider_);
  std::shared_lock lock(mutex_);
  if (chunks_.empty()) throw Error(ErrorCode::EmptyIndex, "knowledge index is empty");
  std::vector<ScoredChunk> scored;
  for (const auto& c : chunks_) {
    if (!kinds.empty() && !kinds.contains(c.kind)) continue;
    scored.push_back({c, snap(cosine_sim(q, c.vector))});
  }
  lock.unlock();
  const auto keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), ranks_before);
  scored.resize(keep);
  return {std::string(query), std::move(scored)};
}

std::size_t VectorIndex::size() const {
  std::shared_lock lock(mutex_);
  return chunks_.size();
}

bool VectorIndex::has_source(std::string_view source) const {
  std::shared_lock lock(mutex_);
  return std::any_of(chunks_.begin(), chunks_.end(), [&](const KnowledgeChunk& c) { return c.source_doc == source; });
}

std::vector<KnowledgeChunk> VectorIndex::chunks() const {
  std::shared_lock lock(mutex_);
  return chunks_;
}

void VectorIndex::save(const std::filesystem::path& path) const {
  json doc;
  doc["format"] = kIndexFormat;
  doc["format_version"] = 1;
  doc["provider"] = provider_->id();
  doc["dim"] = provider_->dim();
  doc["chunks"] = json::array();
  for (const auto& c : chunks()) {
    json j;
    j["id"] = c.chunk_id;
    j["source"] = c.source_doc;
    j["kind"] = to_string(c.kind);
    j["text"] = c.text;
    j["vector"] = std::vector<double>(c.vector.data(), c.vector.data() + c.vector.size());
    j["rules"] = json::array();
    for (const auto& r : c.rules) j["rules"].push_back(r.to_text());
    doc["chunks"].push_back(std::move(j));
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

VectorIndex VectorIndex::load(const std::filesystem::path& path, std::shared_ptr<const EmbeddingProvider> provider) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || doc.value("format", "") != kIndexFormat)
    throw Error(ErrorCode::MalformedDocument, path.string() + " is not a knowledge index");
  VectorIndex index(std::move(provider));
  if (doc.at("provider").get<std::string>() != index.provider().id())
    throw Error(ErrorCode::ConfigError, "index built with provider " + doc.at("provider").get<std::string>());
  try {
    for (const auto& j : doc.at("chunks")) {
      KnowledgeChunk c;
      c.chunk_id = j.at("id").get<std::string>();
      c.source_doc = j.at("source").get<std::string>();
      c.kind = parse_kind(j.at("kind").get<std::string>());
      c.text = j.at("text").get<std::string>();
      const auto v = j.at("vector").get<std::vector<double>>();
      c.vector = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      if (c.vector.size() != index.provider().dim())
        throw Error(ErrorCode::MalformedDocument, "chunk " + c.chunk_id + " has the wrong dimension");
      for (const auto& r : j.at("rules")) c.rules.push_back(parse_rule(r.get<std::string>(), c.chunk_id));
      index.chunks_.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
  return index;
}

std::vector<std::string> ingest(VectorIndex& index, const std::vector<KnowledgeDocument>& docs, std::size_t window,
                                std::size_t overlap) {
  std::vector<ChunkInput> inputs;
  for (const auto& d : docs) {
    const auto texts = chunk(d.body, window, overlap);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      char suffix[16];
      std::snprintf(suffix, sizeof suffix, "#%04zu", i);
      inputs.push_back({d.source + suffix, texts[i], d.source, d.kind, d.rules});
    }
  }
  return index.add(inputs);
}

}  // namespace fuas::memory
