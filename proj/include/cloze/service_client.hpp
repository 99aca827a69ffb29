#pragma once

#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "cloze/scoring.hpp"
#include "cloze/text.hpp"

namespace cloze {

/// Address of the NLP sidecar, e.g. "http://127.0.0.1:8080". Endpoints live under /v1.
struct Endpoint {
  std::string scheme_host_port;

  /// Throws DataError on anything but http://host[:port].
  static Endpoint parse(std::string_view url);
};

/// Thin JSON-over-HTTP client for the sidecar. Each call opens its own
/// connection, so one instance may be shared across threads.
class ServiceClient {
 public:
  explicit ServiceClient(Endpoint endpoint, double timeout_seconds = 30.0);

  /// POST a JSON body to /v1/<path>; returns the response body.
  /// Throws TransportError on connection failure or non-2xx status.
  std::string post(std::string_view path, const std::string& body) const;
  std::string get(std::string_view path) const;

  /// /v1/parse: bracketed constituency parse of `text`.
  std::string parse(std::string_view text) const;

  /// /v1/score: one score per token.
  std::vector<double> score(const Tokens& tokens, scoring::Aggregation mode,
                            std::string_view direction_hint = "auto") const;

  struct Translation {
    std::string cloze;
    bool flagged = false;
  };
  /// /v1/translate with method "sup_seq2seq" or "unsup_seq2seq".
  Translation translate(std::string_view natural, std::string_view method) const;

  /// GET /v1/health succeeds.
  bool healthy() const;

  const Endpoint& endpoint() const { return endpoint_; }

 private:
  Endpoint endpoint_;
  double timeout_seconds_;
};

/// Scorer backed by /v1/score, with at most `max_in_flight` concurrent requests.
class RemoteScorer final : public scoring::Scorer {
 public:
  static constexpr std::ptrdiff_t kDefaultMaxInFlight = 8;

  explicit RemoteScorer(std::shared_ptr<const ServiceClient> client,
                        std::ptrdiff_t max_in_flight = kDefaultMaxInFlight);

  std::vector<double> score_tokens(const Tokens& tokens, scoring::Aggregation mode) const override;

 private:
  std::shared_ptr<const ServiceClient> client_;
  mutable std::counting_semaphore<1024> slots_;
};

}  // namespace cloze
