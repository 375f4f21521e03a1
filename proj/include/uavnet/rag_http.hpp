#pragma once

#include "uavnet/rag.hpp"

#include <chrono>
#include <string>

namespace uavnet::rag {

struct HttpEndpoint {
  std::string host = "localhost";
  int port = 8080;
  std::string path = "/";
  std::chrono::milliseconds timeout{10000};
  int attempts = 3;
  std::chrono::milliseconds backoff{200};  // doubled after each failed attempt
};

// POST {"model", "input": [...]} -> {"vectors": [[...]]}. Transport failures
// after all attempts raise TransportError; malformed bodies raise ValidationError.
class HttpEmbedder final : public Embedder {
 public:
  HttpEmbedder(HttpEndpoint endpoint, std::string model, std::size_t dimension);
  std::string id() const override { return "http:" + model_; }
  std::size_t dimension() const override { return dim_; }
  std::vector<Vector> embed_batch(const std::vector<std::string>& texts) override;

 private:
  HttpEndpoint ep_;
  std::string model_;
  std::size_t dim_;
};

// POST {"prompt"} -> WeightProposal document.
class HttpGenerator final : public Generator {
 public:
  explicit HttpGenerator(HttpEndpoint endpoint) : ep_(std::move(endpoint)) {}
  WeightProposal generate(const ScenarioDigest& digest,
                          const std::vector<ScoredChunk>& retrieved) override;

 private:
  HttpEndpoint ep_;
};

// Shared POST with retry; returns the response body of a 2xx reply.
std::string post_json(const HttpEndpoint& ep, const std::string& body);

}  // namespace uavnet::rag
