#include <doctest.h>

#include <algorithm>
#include <memory>

#include "fuas/core/error.hpp"
#include "fuas/memory/chunker.hpp"
#include "fuas/memory/index.hpp"
#include "oracles.hpp"
#include "retrieval_cases.hpp"
#include "support.hpp"

using namespace fuas;
using namespace fuas::memory;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

std::shared_ptr<const EmbeddingProvider> hashing() { return std::make_shared<HashingEmbedder>(); }

std::vector<std::pair<std::string, double>> exhaustive(const VectorIndex& index, const std::string& query,
                                                       std::size_t k, const std::set<Kind>& kinds) {
  std::vector<std::pair<std::string, Eigen::VectorXd>> docs;
  for (const auto& c : index.chunks())
    if (kinds.empty() || kinds.count(c.kind)) docs.emplace_back(c.chunk_id, c.vector);
  return oracle::top_k(embed(query, index.provider()), docs, k);
}

std::string words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i);
  return s;
}

}  // namespace

TEST_CASE("chunk windows") {
  std::vector<std::size_t> starts;
  for (const auto& s : chunk_spans(1200)) starts.push_back(s.begin);
  CHECK(starts == std::vector<std::size_t>{0, 462, 924});
  CHECK(chunk_spans(1200).back().end == 1200);
  CHECK(chunk_spans(512).size() == 1);
  CHECK(chunk_spans(0).empty());
  const auto texts = chunk(words(1200));
  REQUIRE(texts.size() == 3);
  CHECK(tokenize(texts[1]).front() == "w462");
  CHECK(tokenize(texts[0]).size() == 512);
  CHECK(code_of([] { chunk_spans(10, 50, 50); }) == ErrorCode::InvalidValue);
}

TEST_CASE("embedding contract and cosine") {
  const HashingEmbedder h;
  const auto a = embed("safety margin bowel", h);
  CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a == embed("safety margin bowel", h));
  CHECK(code_of([&] { embed("   ", h); }) == ErrorCode::EmptyText);
  Eigen::Vector3d u(1, 0, 0), v(0, 2, 0), w(3, 0, 0);
  CHECK(cosine_sim(u, v) == 0);
  CHECK(cosine_sim(u, w) == 1);
  CHECK(cosine_sim(u, Eigen::Vector3d(-2, 0, 0)) == -1);
  CHECK(code_of([&] { cosine_sim(u, Eigen::Vector3d::Zero()); }) == ErrorCode::ZeroVector);
  CHECK(code_of([&] { cosine_sim(Eigen::VectorXd(u), Eigen::VectorXd::Ones(2)); }) == ErrorCode::DimMismatch);
}

TEST_CASE("retrieval equals exhaustive sort") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    VectorIndex index(hashing());
    const auto corpus = test::random_corpus(seed);
    index.add(corpus);
    for (const auto& q : test::corpus_queries(corpus, seed)) {
      for (const std::set<Kind>& kinds : {std::set<Kind>{}, std::set<Kind>{Kind::Case}}) {
        const auto got = index.retrieve(q, 3, kinds);
        const auto want = exhaustive(index, q, 3, kinds);
        REQUIRE(got.hits.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
          INFO(q << " got " << got.hits[i].score << " want " << want[i].second);
          CHECK(got.hits[i].chunk.chunk_id == want[i].first);
          CHECK(got.hits[i].score == want[i].second);
        }
      }
    }
  }
}

TEST_CASE("ties break by ascending chunk id") {
  VectorIndex index(hashing());
  index.add({{"b", "same words here", "s", Kind::Case, {}},
             {"a", "same words here", "s", Kind::Case, {}},
             {"c", "other text entirely", "s", Kind::Case, {}}});
  const auto r = index.retrieve("same words here", 2);
  CHECK(r.hits[0].chunk.chunk_id == "a");
  CHECK(r.hits[1].chunk.chunk_id == "b");
  CHECK(r.hits[0].score == r.hits[1].score);
  CHECK(r.query == "same words here");
  CHECK(code_of([&] { VectorIndex(hashing()).retrieve("x"); }) == ErrorCode::EmptyIndex);
  CHECK(code_of([&] { index.retrieve("x", 0); }) == ErrorCode::InvalidValue);
  CHECK(code_of([&] { index.add({{"a", "dup", "s", Kind::Case, {}}}); }) == ErrorCode::InvalidValue);
}

TEST_CASE("knowledge documents and rules") {
  const auto docs = load_knowledge_dir(test::knowledge_dir());
  REQUIRE(docs.size() >= 4);
  const auto it = std::find_if(docs.begin(), docs.end(), [](const auto& d) { return d.source == "fuas-safety-guideline"; });
  REQUIRE(it != docs.end());
  CHECK(it->kind == Kind::Guideline);
  REQUIRE(it->rules.size() == 3);
  CHECK(it->rules[1].rule_id == "G4");
  CHECK(it->rules[1].applicability->field == "oar_min_distance_mm");
  CHECK(parse_rule(it->rules[1].to_text(), "x") == it->rules[1]);

  const auto doc = parse_knowledge_document("---\nkind: case\n---\nbody text\n", "fallback");
  CHECK(doc.source == "fallback");
  CHECK(doc.kind == Kind::Case);
  CHECK(code_of([] { parse_rule("if always then require wavelength >= 3 :: no", "R"); }) ==
        ErrorCode::MalformedDocument);
  CHECK(code_of([] { parse_kind("rumour"); }) == ErrorCode::MalformedDocument);
}

TEST_CASE("ingest, save and load") {
  VectorIndex index(hashing());
  KnowledgeDocument long_doc{"long", Kind::Guideline, {}, words(1200)};
  const auto ids = ingest(index, {long_doc});
  CHECK(ids == std::vector<std::string>{"long#0000", "long#0001", "long#0002"});
  CHECK(index.has_source("long"));
  test::TempDir dir("memory");
  index.save(dir.path() / "index.json");
  const auto back = VectorIndex::load(dir.path() / "index.json", hashing());
  CHECK(back.size() == 3);
  CHECK(back.retrieve("w500 w501", 3).hits[0].chunk.chunk_id == index.retrieve("w500 w501", 3).hits[0].chunk.chunk_id);
  CHECK(code_of([&] { VectorIndex::load(dir.path() / "index.json", std::make_shared<HashingEmbedder>(64)); }) ==
        ErrorCode::ConfigError);
}
