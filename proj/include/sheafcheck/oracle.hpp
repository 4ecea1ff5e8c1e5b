#pragma once

// Local consistency oracle: prompt construction, rating extraction, repeated
// sampling of a chat-completions endpoint, rating distributions and triage.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sheafcheck/cnf.hpp"

namespace sheafcheck::oracle {

/// Environment variable holding the bearer token for live requests.
inline constexpr const char* kApiKeyVariable = "SHEAFCHECK_API_KEY";

struct ClaimText {
  std::string id;
  std::string text;

  /// Throws InputError on empty text or square brackets.
  void validate() const;
};

struct ChatMessage {
  std::string role;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

/// The system prompt, byte-identical to data/prompts/initialization_prompt.txt.
std::string_view initialization_prompt();

/// `evalConsistency: [a] [b]`
std::string user_message(const ClaimText& a, const ClaimText& b);

/// System message followed by the user query.
std::vector<ChatMessage> build_prompt(const ClaimText& a, const ClaimText& b);

/// Rating at the end of a reply, or nullopt when the reply does not end with
/// an integer in 0..10. Trailing punctuation and markup are ignored, as are
/// "n/10" and "n out of 10" suffixes.
std::optional<int> extract_rating(std::string_view reply);

struct BimodalityRule {
  int min_separation = 4;
  Rational min_mass{1, 5};
  std::size_t min_samples = 10;
};

struct RatingDistribution {
  std::array<std::size_t, 11> counts{};
  std::size_t n_success = 0;
  std::size_t n_fail = 0;

  /// Empty and out-of-range entries count as failures.
  static RatingDistribution from_ratings(const std::vector<std::optional<int>>& ratings);
  static RatingDistribution from_counts(const std::array<std::size_t, 11>& counts, std::size_t n_fail);

  std::size_t n_total() const noexcept { return n_success + n_fail; }
  std::optional<Rational> exact_mean() const;
  std::optional<double> mean() const;
  /// Population standard deviation.
  std::optional<double> stddev() const;
  /// Empty when there are too few successes to judge.
  std::optional<bool> bimodal(const BimodalityRule& rule = {}) const;

  bool operator==(const RatingDistribution&) const = default;
};

/// Two local maxima at least `min_separation` bins apart, each holding at
/// least `min_mass` of the successes. Throws InputError below `min_samples`.
bool detect_bimodality(const RatingDistribution& d, const BimodalityRule& rule = {});

struct OracleConfig {
  std::string endpoint = "https://api.openai.com/v1";
  std::string model = "gpt-3.5-turbo";
  std::optional<double> temperature;  // provider default when empty
  std::size_t n_repeats = 100;
  double timeout_seconds = 60.0;
  int max_retries = 1;                  // transport failures only
  std::size_t max_in_flight = 4;
  std::size_t max_transport_failures = 10;  // abort threshold for one pair
  std::uint64_t seed = 0;

  void validate() const;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  std::optional<double> temperature;
  std::uint64_t seed = 0;
  std::size_t call_index = 0;
};

/// A call that failed before producing a reply; eligible for retry.
class TransportFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  /// Must be safe to call concurrently.
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// JSON body for POST <endpoint>/chat/completions.
std::string request_body(const ChatRequest& request);
/// Content of the first choice in a chat-completions response body.
std::string parse_response_body(std::string_view body);

class HttpChatTransport : public ChatTransport {
 public:
  HttpChatTransport(std::string endpoint, std::string api_key, double timeout_seconds);
  /// Reads the API key from SHEAFCHECK_API_KEY; throws EnvironmentError if unset.
  static std::unique_ptr<HttpChatTransport> from_environment(const OracleConfig& config);

  std::string complete(const ChatRequest& request) override;

 private:
  std::string base_;  // scheme://host[:port]
  std::string path_;  // path prefix, no trailing slash
  std::string api_key_;
  double timeout_seconds_;
};

/// Deterministic mock reading canned replies from `<dir>/<pair_hash>.json`.
class FixtureTransport : public ChatTransport {
 public:
  explicit FixtureTransport(std::filesystem::path directory);
  std::string complete(const ChatRequest& request) override;

 private:
  std::filesystem::path directory_;
};

/// Replies produced by a callback; for tests.
class ScriptedTransport : public ChatTransport {
 public:
  explicit ScriptedTransport(std::function<std::string(const ChatRequest&)> fn) : fn_(std::move(fn)) {}
  std::string complete(const ChatRequest& request) override { return fn_(request); }

 private:
  std::function<std::string(const ChatRequest&)> fn_;
};

/// Hex FNV-1a 64 of the user message; names mock fixture files.
std::string pair_hash(const ClaimText& a, const ClaimText& b);

struct RatingSample {
  std::string reply;
  std::optional<int> rating;
  double latency_ms = 0.0;
  bool transport_failed = false;
};

/// Raised when too many calls exhaust their retries. Carries what was collected.
class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, RatingDistribution partial)
      : std::runtime_error(what), partial_(partial) {}
  const RatingDistribution& partial() const noexcept { return partial_; }

 private:
  RatingDistribution partial_;
};

/// Issues `n_repeats` independent calls with bounded parallelism and
/// aggregates the extracted ratings.
RatingDistribution rate_pair(const OracleConfig& config, ChatTransport& transport, const ClaimText& a,
                             const ClaimText& b, std::vector<RatingSample>* samples = nullptr);

enum class TriageDecision { Accept, Reprompt, Escalate };

std::string_view to_string(TriageDecision d);

struct TriagePolicy {
  double max_stddev = 2.0;
  int max_reprompts = 1;
  std::string stronger_model = "gpt-4";
  BimodalityRule rule;
};

struct TriageRecord {
  int round = 0;
  std::string model;
  TriageDecision decision = TriageDecision::Accept;
  std::string reason;
};

/// Accept a unimodal, low-variance distribution; otherwise reprompt until
/// `max_reprompts` is used up, then escalate.
TriageDecision triage(const RatingDistribution& d, const TriagePolicy& policy, int reprompts_done,
                      std::vector<TriageRecord>* log = nullptr);

struct TriagedRating {
  RatingDistribution distribution;
  std::vector<TriageRecord> log;
  /// Still unacceptable after escalation.
  bool ambiguous = false;
};

/// Runs rate_pair and triage until acceptance or until the escalated model
/// has answered. Each reprompt draws with a fresh seed.
TriagedRating rate_with_triage(const OracleConfig& config, ChatTransport& transport, const TriagePolicy& policy,
                               const ClaimText& a, const ClaimText& b);

}  // namespace sheafcheck::oracle
