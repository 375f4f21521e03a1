#include "uavnet/rag_http.hpp"

#include "uavnet/errors.hpp"

#include <httplib.h>
#include <json.hpp>

#include <thread>

namespace uavnet::rag {

using nlohmann::json;

std::string post_json(const HttpEndpoint& ep, const std::string& body) {
  std::string last_error = "no attempt made";
  auto wait = ep.backoff;
  for (int attempt = 0; attempt < ep.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(wait);
      wait *= 2;
    }
    httplib::Client cli(ep.host, ep.port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(ep.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(ep.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    auto res = cli.Post(ep.path, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300)
      throw TransportError(ep.host + ":" + std::to_string(ep.port) + ep.path + " returned HTTP " +
                           std::to_string(res->status) + ": " + res->body);
    return res->body;
  }
  throw TransportError(ep.host + ":" + std::to_string(ep.port) + ep.path + " unreachable after " +
                       std::to_string(ep.attempts) + " attempts: " + last_error);
}

HttpEmbedder::HttpEmbedder(HttpEndpoint endpoint, std::string model, std::size_t dimension)
    : ep_(std::move(endpoint)), model_(std::move(model)), dim_(dimension) {}

std::vector<Vector> HttpEmbedder::embed_batch(const std::vector<std::string>& texts) {
  const std::string raw = post_json(ep_, json{{"model", model_}, {"input", texts}}.dump());
  std::vector<Vector> out;
  try {
    const auto j = json::parse(raw);
    const auto vecs = j.at("vectors").get<std::vector<std::vector<double>>>();
    if (vecs.size() != texts.size()) throw std::invalid_argument("vector count mismatch");
    for (const auto& v : vecs) {
      if (v.size() != dim_) throw std::invalid_argument("vector dimension mismatch");
      Vector e = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
      const double n = e.norm();
      if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("zero or non-finite vector");
      out.push_back(e / n);
    }
  } catch (const std::exception& e) {
    throw ValidationError(std::string("embedding response: ") + e.what(), raw);
  }
  return out;
}

WeightProposal HttpGenerator::generate(const ScenarioDigest& digest,
                                       const std::vector<ScoredChunk>& retrieved) {
  if (retrieved.empty()) throw DomainError("generate_weights: no retrieved knowledge");
  const std::string raw = post_json(ep_, json{{"prompt", build_prompt(digest, retrieved)}}.dump());
  return parse_weight_proposal(raw);
}

}  // namespace uavnet::rag
