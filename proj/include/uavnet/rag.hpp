#pragma once

#include "uavnet/epg_core.hpp"
#include "uavnet/types.hpp"

#include <array>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace uavnet::rag {

struct KnowledgeChunk {
  std::string id;      // "<source>#<ordinal>"
  std::string source;
  std::size_t ordinal = 0;
  std::string text;
  Vector vector;       // unit norm once embedded
};

struct KnowledgeIndex {
  std::size_t dimension = 0;
  std::size_t block_size = 0;
  std::string embedder_id;
  std::vector<KnowledgeChunk> chunks;
};

struct Document {
  std::string id;
  std::string text;
};

// Sentences end at '.', '!' or '?' followed by whitespace or end of text.
// Returned sentences are whitespace-normalized.
std::vector<std::string> split_sentences(const std::string& text);
std::string normalize_whitespace(const std::string& text);

// Consecutive blocks of block_size sentences; empty documents are skipped and
// reported through `warnings`.
std::vector<KnowledgeChunk> chunk_corpus(const std::vector<Document>& docs, std::size_t block_size,
                                         std::vector<std::string>* warnings = nullptr);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<Vector> embed_batch(const std::vector<std::string>& texts) = 0;
  Vector embed(const std::string& text) { return embed_batch({text}).front(); }
};

// Lower-cased alphanumeric runs.
std::vector<std::string> tokenize(const std::string& text);
std::uint64_t fnv1a(const std::string& s);

// Term-frequency counts hashed into D buckets with FNV-1a, L2-normalized.
// Text without tokens maps to the zero vector.
class HashedBowEmbedder final : public Embedder {
 public:
  explicit HashedBowEmbedder(std::size_t dimension = 256) : dim_(dimension) {}
  std::string id() const override { return "hashed-bow-" + std::to_string(dim_); }
  std::size_t dimension() const override { return dim_; }
  std::vector<Vector> embed_batch(const std::vector<std::string>& texts) override;
  std::size_t bucket(const std::string& token) const { return fnv1a(token) % dim_; }

 private:
  std::size_t dim_;
};

// Throws DomainError on a zero vector or a dimension mismatch.
double cosine(const Vector& a, const Vector& b);

KnowledgeIndex build_index(std::vector<KnowledgeChunk> chunks, Embedder& embedder,
                           std::size_t block_size);

struct ScoredChunk {
  const KnowledgeChunk* chunk = nullptr;
  double score = 0.0;
};

// Exactly k results, score descending, ties by chunk id. Zero query vectors
// score 0 against everything.
std::vector<ScoredChunk> retrieve_topk(const KnowledgeIndex& index, const std::string& query,
                                       std::size_t k, Embedder& embedder);

void save_index(const KnowledgeIndex& index, const std::string& path);
KnowledgeIndex load_index(const std::string& path);

// ---- weight generation ----

enum class Emphasis { throughput, energy, latency, balanced };
std::string to_string(Emphasis e);
Emphasis parse_emphasis(const std::string& s);

struct ScenarioDigest {
  std::size_t n_uavs = 0;
  std::size_t n_users = 0;
  Vec2 area{0.0, 0.0};
  double obstacle_density = 0.0;    // obstacle footprint / area
  double interference_level = 0.0;  // fraction of UAV pairs in line of sight
  Emphasis emphasis = Emphasis::balanced;
};

ScenarioDigest digest_scenario(const WorldState& world, Emphasis emphasis);

struct WeightProposal {
  std::array<double, 3> eta{1.0, 1.0, 1.0};
  std::array<double, 3> psi{1.0, 1.0, 1.0};
  std::array<double, 3> objective_weights{1.0, 1.0, 1.0};
  std::string rationale;
  std::vector<std::string> source_chunk_ids;

  // Throws ValidationError (with an empty raw payload) on a bad weight.
  void validate() const;
};

// Strict parse of a generator response; ValidationError carries `raw`.
WeightProposal parse_weight_proposal(const std::string& raw);
std::string to_json(const WeightProposal& p);

void apply_weights(GameConfig& cfg, const WeightProposal& p);

std::string query_for(const ScenarioDigest& digest);
std::string build_prompt(const ScenarioDigest& digest, const std::vector<ScoredChunk>& retrieved);

class Generator {
 public:
  virtual ~Generator() = default;
  virtual WeightProposal generate(const ScenarioDigest& digest,
                                  const std::vector<ScoredChunk>& retrieved) = 0;
};

inline constexpr double kHighInterference = 0.5;

// Rule table keyed on the emphasis; high interference doubles η2.
class MockGenerator final : public Generator {
 public:
  WeightProposal generate(const ScenarioDigest& digest,
                          const std::vector<ScoredChunk>& retrieved) override;
};

// ---- retrieval precision ----

struct RelevanceQuery {
  std::string query;
  std::set<std::string> relevant_sources;
};

struct PrecisionCell {
  std::size_t block_size = 0;
  std::size_t k = 0;
  double precision = 0.0;  // mean precision@k over queries
};

// Doc-level relevance: a retrieved chunk counts when its source is relevant.
std::vector<PrecisionCell> precision_sweep(const std::vector<Document>& docs,
                                           const std::vector<RelevanceQuery>& queries,
                                           const std::vector<std::size_t>& block_sizes,
                                           const std::vector<std::size_t>& ks,
                                           Embedder& embedder);
std::string precision_csv(const std::vector<PrecisionCell>& cells);

struct PlantedCorpus {
  std::vector<Document> docs;
  std::vector<RelevanceQuery> queries;
};

// Topic documents of `sentences` sentences over per-topic vocabularies whose
// hash buckets are pairwise disjoint, one query per topic.
PlantedCorpus planted_corpus(std::size_t topics, std::size_t sentences,
                             const HashedBowEmbedder& embedder);

std::vector<Document> load_corpus_dir(const std::string& dir);

}  // namespace uavnet::rag
