#include "uavnet/rag.hpp"

#include "uavnet/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace uavnet::rag {

using nlohmann::json;

std::string normalize_whitespace(const std::string& text) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::vector<std::string> split_sentences(const std::string& text) {
  const std::string t = normalize_whitespace(text);
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const char c = t[i];
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == t.size() || t[i + 1] == ' ')) {
      out.push_back(t.substr(start, i + 1 - start));
      start = i + 2;
    }
  }
  if (start < t.size()) out.push_back(t.substr(start));
  return out;
}

std::vector<KnowledgeChunk> chunk_corpus(const std::vector<Document>& docs, std::size_t block_size,
                                         std::vector<std::string>* warnings) {
  if (block_size == 0) throw DomainError("chunk_corpus: block_size must be >= 1");
  std::vector<KnowledgeChunk> out;
  for (const auto& doc : docs) {
    const auto sentences = split_sentences(doc.text);
    if (sentences.empty()) {
      if (warnings) warnings->push_back("skipping empty document " + doc.id);
      continue;
    }
    for (std::size_t b = 0, ordinal = 0; b < sentences.size(); b += block_size, ++ordinal) {
      std::string text;
      for (std::size_t s = b; s < std::min(b + block_size, sentences.size()); ++s) {
        if (!text.empty()) text.push_back(' ');
        text += sentences[s];
      }
      out.push_back({doc.id + "#" + std::to_string(ordinal), doc.id, ordinal, text, Vector()});
    }
  }
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<Vector> HashedBowEmbedder::embed_batch(const std::vector<std::string>& texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim_));
    for (const auto& tok : tokenize(t)) v(static_cast<Eigen::Index>(bucket(tok))) += 1.0;
    const double n = v.norm();
    if (n > 0.0) v /= n;
    out.push_back(std::move(v));
  }
  return out;
}

double cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DomainError("cosine: dimension mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw DomainError("cosine: zero vector");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

KnowledgeIndex build_index(std::vector<KnowledgeChunk> chunks, Embedder& embedder,
                           std::size_t block_size) {
  std::vector<std::string> texts;
  texts.reserve(chunks.size());
  for (const auto& c : chunks) texts.push_back(c.text);
  auto vectors = embedder.embed_batch(texts);
  if (vectors.size() != chunks.size()) throw Error("build_index: embedder returned wrong count");
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (static_cast<std::size_t>(vectors[i].size()) != embedder.dimension())
      throw Error("build_index: embedder returned wrong dimension");
    chunks[i].vector = std::move(vectors[i]);
  }
  return {embedder.dimension(), block_size, embedder.id(), std::move(chunks)};
}

std::vector<ScoredChunk> retrieve_topk(const KnowledgeIndex& index, const std::string& query,
                                       std::size_t k, Embedder& embedder) {
  if (index.chunks.empty()) throw DomainError("retrieve_topk: empty index");
  if (k == 0 || k > index.chunks.size())
    throw DomainError("retrieve_topk: k must lie in [1, chunk count]");
  const Vector q = embedder.embed(query);
  std::vector<ScoredChunk> scored;
  scored.reserve(index.chunks.size());
  for (const auto& c : index.chunks) {
    const bool zero = q.norm() == 0.0 || c.vector.norm() == 0.0;
    scored.push_back({&c, zero ? 0.0 : cosine(q, c.vector)});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.chunk->id < b.chunk->id;
  });
  scored.resize(k);
  return scored;
}

void save_index(const KnowledgeIndex& index, const std::string& path) {
  json j;
  j["dimension"] = index.dimension;
  j["block_size"] = index.block_size;
  j["embedder_id"] = index.embedder_id;
  j["chunks"] = json::array();
  for (const auto& c : index.chunks) {
    std::vector<double> v(c.vector.data(), c.vector.data() + c.vector.size());
    j["chunks"].push_back(
        {{"id", c.id}, {"source", c.source}, {"ordinal", c.ordinal}, {"text", c.text}, {"vector", v}});
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw Error("save_index: cannot write " + path);
    os << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

KnowledgeIndex load_index(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("load_index: cannot open " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError("load_index: " + std::string(e.what()));
  }
  KnowledgeIndex idx;
  idx.dimension = j.at("dimension").get<std::size_t>();
  idx.block_size = j.value("block_size", std::size_t{0});
  idx.embedder_id = j.at("embedder_id").get<std::string>();
  for (const auto& c : j.at("chunks")) {
    const auto v = c.at("vector").get<std::vector<double>>();
    if (v.size() != idx.dimension) throw ConfigError("load_index: vector dimension mismatch");
    KnowledgeChunk chunk{c.at("id").get<std::string>(), c.at("source").get<std::string>(),
                         c.at("ordinal").get<std::size_t>(), c.at("text").get<std::string>(),
                         Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()))};
    idx.chunks.push_back(std::move(chunk));
  }
  return idx;
}

// ---- weight generation ----

std::string to_string(Emphasis e) {
  switch (e) {
    case Emphasis::throughput: return "throughput";
    case Emphasis::energy: return "energy";
    case Emphasis::latency: return "latency";
    case Emphasis::balanced: return "balanced";
  }
  return "balanced";
}

Emphasis parse_emphasis(const std::string& s) {
  if (s == "throughput") return Emphasis::throughput;
  if (s == "energy") return Emphasis::energy;
  if (s == "latency") return Emphasis::latency;
  if (s == "balanced") return Emphasis::balanced;
  throw ConfigError("unknown optimization emphasis '" + s + "'");
}

ScenarioDigest digest_scenario(const WorldState& world, Emphasis emphasis) {
  ScenarioDigest d;
  d.n_uavs = world.n_uavs();
  d.n_users = world.n_users();
  d.area = world.area;
  double footprint = 0.0;
  for (const auto& o : world.obstacles) footprint += o.width * o.depth;
  d.obstacle_density = footprint / (world.area.x() * world.area.y());
  std::size_t pairs = 0, los = 0;
  for (std::size_t i = 0; i < world.n_uavs(); ++i) {
    for (std::size_t j = i + 1; j < world.n_uavs(); ++j) {
      ++pairs;
      los += static_cast<std::size_t>(
          los_between(world.uavs[i].position, world.uavs[j].position, world.obstacles));
    }
  }
  d.interference_level = pairs ? static_cast<double>(los) / static_cast<double>(pairs) : 0.0;
  d.emphasis = emphasis;
  return d;
}

void WeightProposal::validate() const {
  for (const auto* triple : {&eta, &psi, &objective_weights}) {
    bool nonzero = false;
    for (double w : *triple) {
      if (!std::isfinite(w) || w < 0.0)
        throw ValidationError("weight proposal: weights must be finite and >= 0", "");
      nonzero = nonzero || w > 0.0;
    }
    if (!nonzero) throw ValidationError("weight proposal: each triple needs a nonzero weight", "");
  }
}

namespace {

std::array<double, 3> triple(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 3) throw std::invalid_argument(std::string(key) + " must be a 3-array");
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw std::invalid_argument(std::string(key) + " must hold numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

}  // namespace

WeightProposal parse_weight_proposal(const std::string& raw) {
  WeightProposal p;
  try {
    const json j = json::parse(raw);
    if (!j.is_object()) throw std::invalid_argument("top level must be an object");
    static const std::set<std::string> allowed{"eta", "psi", "objective_weights", "rationale",
                                               "source_chunk_ids"};
    for (const auto& [key, _] : j.items()) {
      if (!allowed.count(key)) throw std::invalid_argument("unexpected field '" + key + "'");
    }
    p.eta = triple(j, "eta");
    p.psi = triple(j, "psi");
    p.objective_weights = triple(j, "objective_weights");
    p.rationale = j.value("rationale", std::string());
    if (j.contains("source_chunk_ids"))
      p.source_chunk_ids = j.at("source_chunk_ids").get<std::vector<std::string>>();
  } catch (const std::exception& e) {
    throw ValidationError(std::string("weight proposal: ") + e.what(), raw);
  }
  try {
    p.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), raw);
  }
  return p;
}

std::string to_json(const WeightProposal& p) {
  json j{{"eta", p.eta},
         {"psi", p.psi},
         {"objective_weights", p.objective_weights},
         {"rationale", p.rationale},
         {"source_chunk_ids", p.source_chunk_ids}};
  return j.dump(2);
}

void apply_weights(GameConfig& cfg, const WeightProposal& p) {
  p.validate();
  cfg.eta = p.eta;
  cfg.psi = p.psi;
  cfg.objective_weights = p.objective_weights;
}

std::string query_for(const ScenarioDigest& d) {
  std::ostringstream os;
  os << "UAV network with " << d.n_uavs << " UAVs and " << d.n_users << " ground users. ";
  os << "Optimization emphasis: " << to_string(d.emphasis) << ". ";
  if (d.interference_level > kHighInterference) os << "High interference between line of sight UAV links. ";
  if (d.obstacle_density > 0.0) os << "Buildings and obstacles block line of sight. ";
  os << "Choose utility weight coefficients for " << to_string(d.emphasis) << ".";
  return os.str();
}

std::string build_prompt(const ScenarioDigest& d, const std::vector<ScoredChunk>& retrieved) {
  std::ostringstream os;
  os << "Scenario: " << d.n_uavs << " UAVs, " << d.n_users << " ground users, area "
     << d.area.x() << " m x " << d.area.y() << " m, obstacle density " << d.obstacle_density
     << ", interference level " << d.interference_level << ", emphasis "
     << to_string(d.emphasis) << ".\n\nKnowledge:\n";
  for (const auto& r : retrieved) os << "[" << r.chunk->id << "] " << r.chunk->text << "\n";
  os << "\nReply with a JSON object with fields eta, psi, objective_weights (three non-negative "
        "numbers each), rationale (string) and source_chunk_ids (list of strings).\n";
  return os.str();
}

WeightProposal MockGenerator::generate(const ScenarioDigest& digest,
                                       const std::vector<ScoredChunk>& retrieved) {
  if (retrieved.empty()) throw DomainError("generate_weights: no retrieved knowledge");
  WeightProposal p;
  switch (digest.emphasis) {
    case Emphasis::balanced:
      p.rationale = "balanced emphasis keeps unit weights";
      break;
    case Emphasis::energy:
      p.eta = {1.0, 1.0, 2.0};
      p.psi = {1.0, 2.0, 1.0};
      p.objective_weights = {1.0, 2.0, 1.0};
      p.rationale = "energy emphasis raises the energy weights";
      break;
    case Emphasis::throughput:
      p.psi = {2.0, 1.0, 1.0};
      p.objective_weights = {2.0, 1.0, 1.0};
      p.rationale = "throughput emphasis raises the rate weights";
      break;
    case Emphasis::latency:
      p.psi = {1.0, 1.0, 2.0};
      p.objective_weights = {1.0, 1.0, 2.0};
      p.rationale = "latency emphasis raises the delay weights";
      break;
  }
  if (digest.interference_level > kHighInterference) {
    p.eta[1] *= 2.0;
    p.rationale += "; dense line of sight doubles the interference weight";
  }
  for (const auto& r : retrieved) p.source_chunk_ids.push_back(r.chunk->id);
  p.validate();
  return p;
}

// ---- retrieval precision ----

std::vector<PrecisionCell> precision_sweep(const std::vector<Document>& docs,
                                           const std::vector<RelevanceQuery>& queries,
                                           const std::vector<std::size_t>& block_sizes,
                                           const std::vector<std::size_t>& ks,
                                           Embedder& embedder) {
  if (queries.empty()) throw DomainError("precision_sweep: no queries");
  std::vector<PrecisionCell> cells;
  for (std::size_t b : block_sizes) {
    const auto index = build_index(chunk_corpus(docs, b), embedder, b);
    for (std::size_t k : ks) {
      double sum = 0.0;
      const std::size_t kk = std::min(k, index.chunks.size());
      for (const auto& q : queries) {
        std::size_t hits = 0;
        for (const auto& r : retrieve_topk(index, q.query, kk, embedder))
          hits += q.relevant_sources.count(r.chunk->source);
        sum += static_cast<double>(hits) / static_cast<double>(k);
      }
      cells.push_back({b, k, sum / static_cast<double>(queries.size())});
    }
  }
  return cells;
}

std::string precision_csv(const std::vector<PrecisionCell>& cells) {
  std::string out = "block_size,k,precision\n";
  char buf[64];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", c.block_size, c.k, c.precision);
    out += buf;
  }
  return out;
}

PlantedCorpus planted_corpus(std::size_t topics, std::size_t sentences,
                             const HashedBowEmbedder& embedder) {
  constexpr std::size_t kWordsPerTopic = 6;
  constexpr std::size_t kWordsPerSentence = 4;
  static const char* const kStems[] = {"relay", "beacon", "rotor", "uplink", "canopy",
                                       "mast",  "ridge",  "harbor", "lantern", "orbit"};
  std::set<std::size_t> used;
  std::vector<std::vector<std::string>> vocab(topics);
  std::size_t serial = 0;
  for (std::size_t t = 0; t < topics; ++t) {
    while (vocab[t].size() < kWordsPerTopic) {
      const std::string w = std::string(kStems[serial % 10]) + std::to_string(serial);
      ++serial;
      if (serial > 100000) throw Error("planted_corpus: could not find disjoint buckets");
      if (used.insert(embedder.bucket(w)).second) vocab[t].push_back(w);
    }
  }
  PlantedCorpus pc;
  for (std::size_t t = 0; t < topics; ++t) {
    std::string text;
    for (std::size_t s = 0; s < sentences; ++s) {
      std::string sentence;
      for (std::size_t w = 0; w < kWordsPerSentence; ++w) {
        if (!sentence.empty()) sentence.push_back(' ');
        sentence += vocab[t][(s + w) % kWordsPerTopic];
      }
      sentence[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sentence[0])));
      text += sentence + ". ";
    }
    const std::string id = "topic" + std::to_string(t);
    pc.docs.push_back({id, text});
    pc.queries.push_back({vocab[t][0] + " " + vocab[t][1] + " " + vocab[t][2], {id}});
  }
  return pc;
}

std::vector<Document> load_corpus_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("corpus directory not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Document> docs;
  for (const auto& f : files) {
    std::ifstream is(f);
    std::stringstream ss;
    ss << is.rdbuf();
    docs.push_back({f.stem().string(), ss.str()});
  }
  return docs;
}

}  // namespace uavnet::rag
