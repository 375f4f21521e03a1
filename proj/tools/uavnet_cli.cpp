#include "uavnet/errors.hpp"
#include "uavnet/harness.hpp"
#include "uavnet/rag.hpp"
#include "uavnet/rag_http.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>

namespace {

using namespace uavnet;

struct EmbedOptions {
  std::string host;
  int port = 8080;
  std::string path = "/embed";
  std::string model = "default";
  std::size_t dimension = 256;

  std::unique_ptr<rag::Embedder> make() const {
    if (host.empty()) return std::make_unique<rag::HashedBowEmbedder>(dimension);
    rag::HttpEndpoint ep;
    ep.host = host;
    ep.port = port;
    ep.path = path;
    return std::make_unique<rag::HttpEmbedder>(ep, model, dimension);
  }
};

void add_embed_options(CLI::App* cmd, EmbedOptions& e) {
  cmd->add_option("--dim", e.dimension, "Embedding dimension")->capture_default_str();
  cmd->add_option("--embed-host", e.host, "Embedding service host (default: hashed embedder)");
  cmd->add_option("--embed-port", e.port, "Embedding service port")->capture_default_str();
  cmd->add_option("--embed-path", e.path, "Embedding service path")->capture_default_str();
  cmd->add_option("--embed-model", e.model, "Embedding model name")->capture_default_str();
}

void print_report(const RunReport& report) {
  std::printf("%-8s %4s %6s %14s %14s %14s %12s\n", "algo", "N", "seeds", "Th [bit/s]",
              "E [J]", "latency [s]", "objective");
  for (const auto& g : report.groups) {
    std::printf("%-8s %4zu %6zu %14.6g %14.6g %14.6g %12.6g\n", g.algorithm.c_str(), g.n_uavs,
                g.seeds, g.throughput.mean, g.energy.mean, g.latency.mean, g.objective.mean);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV network topology optimization with exact potential games"};
  app.require_subcommand(1);

  ExperimentSpec spec;
  std::string algo = "l3_ag";
  std::string weights = "config";
  std::vector<std::string> algos;

  auto add_experiment_options = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", spec.scenario_path, "Scenario JSON file")->required();
    cmd->add_option("--seeds", spec.seeds, "Comma-separated seeds")->delimiter(',');
    cmd->add_option("--out", spec.output_dir, "Output directory");
    cmd->add_option("--sweep-n", spec.sweep, "Comma-separated UAV counts")->delimiter(',');
    cmd->add_option("--weights", weights, "Weight source")->check(CLI::IsMember({"config", "rag"}));
    cmd->add_option("--jobs", spec.jobs, "Worker threads (0 = all cores)");
  };

  auto* run = app.add_subcommand("run", "Run one algorithm over seeds and sweep points");
  add_experiment_options(run);
  run->add_option("--algo", algo, "l3_ag, brd_epg, brd_ncg, etg or ga")->capture_default_str();
  run->add_flag("--snapshots", spec.snapshots, "Record adjacency after every round");

  auto* compare = app.add_subcommand("compare", "Paired comparison of algorithms");
  add_experiment_options(compare);
  compare->add_option("--algos", algos, "Algorithms to compare (default: all)")->delimiter(',');

  auto* ragcmd = app.add_subcommand("rag", "Knowledge retrieval utilities");
  ragcmd->require_subcommand(1);
  EmbedOptions embed;

  std::string corpus, index_path, query, csv_out;
  std::size_t block_size = 4, k = 3;
  auto* rindex = ragcmd->add_subcommand("index", "Chunk and embed a corpus directory");
  rindex->add_option("--corpus", corpus, "Directory of .txt files")->required();
  rindex->add_option("--block-size", block_size, "Sentences per chunk")->capture_default_str();
  rindex->add_option("--out", index_path, "Index JSON file")->required();
  add_embed_options(rindex, embed);

  auto* rquery = ragcmd->add_subcommand("query", "Top-k retrieval from an index");
  rquery->add_option("--index", index_path, "Index JSON file")->required();
  rquery->add_option("--query", query, "Query text")->required();
  rquery->add_option("-k", k, "Number of chunks")->capture_default_str();
  add_embed_options(rquery, embed);

  std::vector<std::size_t> blocks{1, 2, 4, 8}, ks{1, 3, 5};
  std::size_t topics = 6;
  auto* rsweep = ragcmd->add_subcommand("sweep", "precision@k over block sizes");
  rsweep->add_option("--corpus", corpus, "Directory of .txt files (default: planted corpus)");
  rsweep->add_option("--topics", topics, "Planted topics")->capture_default_str();
  rsweep->add_option("--blocks", blocks, "Block sizes")->delimiter(',');
  rsweep->add_option("--ks", ks, "k values")->delimiter(',');
  rsweep->add_option("--out", csv_out, "CSV output (default: stdout)");
  add_embed_options(rsweep, embed);

  std::string emphasis = "balanced";
  std::uint64_t seed = 1;
  auto* rweights = ragcmd->add_subcommand("weights", "Generate utility weights for a scenario");
  rweights->add_option("--scenario", spec.scenario_path, "Scenario JSON file")->required();
  rweights->add_option("--seed", seed, "Seed used to place the scenario")->capture_default_str();
  rweights->add_option("--emphasis", emphasis, "throughput, energy, latency or balanced")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    spec.weights = weights == "rag" ? WeightSource::rag : WeightSource::config;
    if (run->parsed()) {
      spec.algorithm = parse_algorithm(algo);
      print_report(run_pipeline(spec));
    } else if (compare->parsed()) {
      std::vector<Algorithm> list;
      for (const auto& a : algos) list.push_back(parse_algorithm(a));
      if (list.empty()) list = all_algorithms();
      const auto report = compare_algorithms(spec, list);
      print_report(report);
    } else if (rindex->parsed()) {
      auto emb = embed.make();
      std::vector<std::string> warnings;
      auto chunks = rag::chunk_corpus(rag::load_corpus_dir(corpus), block_size, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      const auto idx = rag::build_index(std::move(chunks), *emb, block_size);
      rag::save_index(idx, index_path);
      std::printf("%zu chunks, dimension %zu\n", idx.chunks.size(), idx.dimension);
    } else if (rquery->parsed()) {
      auto idx = rag::load_index(index_path);
      embed.dimension = idx.dimension;
      auto emb = embed.make();
      if (emb->id() != idx.embedder_id)
        throw ConfigError("index was built with " + idx.embedder_id + ", not " + emb->id());
      for (const auto& r : rag::retrieve_topk(idx, query, k, *emb))
        std::printf("%.6f  %s  %s\n", r.score, r.chunk->id.c_str(), r.chunk->text.c_str());
    } else if (rsweep->parsed()) {
      auto emb = embed.make();
      std::vector<rag::Document> docs;
      std::vector<rag::RelevanceQuery> queries;
      if (corpus.empty()) {
        auto planted = rag::planted_corpus(topics, 12, rag::HashedBowEmbedder(embed.dimension));
        docs = std::move(planted.docs);
        queries = std::move(planted.queries);
      } else {
        docs = rag::load_corpus_dir(corpus);
        for (const auto& d : docs) {
          const auto sentences = rag::split_sentences(d.text);
          if (!sentences.empty()) queries.push_back({sentences.front(), {d.id}});
        }
      }
      const auto csv = rag::precision_csv(rag::precision_sweep(docs, queries, blocks, ks, *emb));
      if (csv_out.empty()) std::fputs(csv.c_str(), stdout);
      else write_file_atomic(csv_out, csv);
    } else if (rweights->parsed()) {
      Scenario sc = load_scenario(spec.scenario_path);
      sc.rag.emphasis = rag::parse_emphasis(emphasis);
      const auto world = instantiate(sc, sc.n_uavs, seed);
      std::printf("%s\n", rag::to_json(rag_weights(sc, world)).c_str());
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\nraw response: " << e.raw_response() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
