#include "cloze/service_client.hpp"

#include <httplib.h>

#include <json.hpp>

#include "cloze/error.hpp"

namespace cloze {

using nlohmann::json;

namespace {

std::string v1(std::string_view path) {
  std::string out = "/v1/";
  out += path;
  return out;
}

json parse_body(const std::string& body, std::string_view what) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw TransportError(std::string(what) + ": malformed JSON response: " + e.what());
  }
}

}  // namespace

Endpoint Endpoint::parse(std::string_view url) {
  if (!url.starts_with("http://") || url.size() <= 7)
    throw DataError("backend address must look like http://host:port, got '" + std::string(url) + "'");
  std::string s(url);
  while (s.size() > 7 && s.back() == '/') s.pop_back();
  if (s.find('/', 7) != std::string::npos) throw DataError("backend address must not carry a path: '" + s + "'");
  return Endpoint{s};
}

ServiceClient::ServiceClient(Endpoint endpoint, double timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds) {}

std::string ServiceClient::post(std::string_view path, const std::string& body) const {
  httplib::Client cli(endpoint_.scheme_host_port);
  cli.set_connection_timeout(std::chrono::duration<double>(timeout_seconds_));
  cli.set_read_timeout(std::chrono::duration<double>(timeout_seconds_));
  auto res = cli.Post(v1(path), body, "application/json");
  if (!res) throw TransportError("POST " + v1(path) + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw TransportError("POST " + v1(path) + " returned HTTP " + std::to_string(res->status) + ": " + res->body);
  return res->body;
}

std::string ServiceClient::get(std::string_view path) const {
  httplib::Client cli(endpoint_.scheme_host_port);
  cli.set_connection_timeout(std::chrono::duration<double>(timeout_seconds_));
  auto res = cli.Get(v1(path));
  if (!res) throw TransportError("GET " + v1(path) + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw TransportError("GET " + v1(path) + " returned HTTP " + std::to_string(res->status));
  return res->body;
}

std::string ServiceClient::parse(std::string_view text) const {
  const json reply = parse_body(post("parse", json{{"text", text}}.dump()), "/parse");
  if (!reply.contains("ptb") || !reply["ptb"].is_string()) throw TransportError("/parse response lacks 'ptb'");
  return reply["ptb"].get<std::string>();
}

std::vector<double> ServiceClient::score(const Tokens& tokens, scoring::Aggregation mode,
                                         std::string_view direction_hint) const {
  const json request{{"tokens", tokens},
                     {"mode", mode == scoring::Aggregation::mean_logit ? "logit" : "logprob"},
                     {"direction_hint", direction_hint}};
  const json reply = parse_body(post("score", request.dump()), "/score");
  if (!reply.contains("per_token_scores") || !reply["per_token_scores"].is_array())
    throw TransportError("/score response lacks 'per_token_scores'");
  auto scores = reply["per_token_scores"].get<std::vector<double>>();
  if (scores.size() != tokens.size())
    throw TransportError("/score returned " + std::to_string(scores.size()) + " scores for " +
                         std::to_string(tokens.size()) + " tokens");
  return scores;
}

ServiceClient::Translation ServiceClient::translate(std::string_view natural, std::string_view method) const {
  const json reply = parse_body(post("translate", json{{"natural", natural}, {"method", method}}.dump()), "/translate");
  if (!reply.contains("cloze") || !reply["cloze"].is_string())
    throw TransportError("/translate response lacks 'cloze'");
  return {reply["cloze"].get<std::string>(), reply.value("flagged", false)};
}

bool ServiceClient::healthy() const {
  const json reply = parse_body(get("health"), "/health");
  return reply.value("status", std::string{}) == "ok";
}

RemoteScorer::RemoteScorer(std::shared_ptr<const ServiceClient> client, std::ptrdiff_t max_in_flight)
    : client_(std::move(client)), slots_(std::clamp<std::ptrdiff_t>(max_in_flight, 1, 1024)) {}

std::vector<double> RemoteScorer::score_tokens(const Tokens& tokens, scoring::Aggregation mode) const {
  slots_.acquire();
  try {
    auto out = client_->score(tokens, mode);
    slots_.release();
    return out;
  } catch (...) {
    slots_.release();
    throw;
  }
}

}  // namespace cloze
